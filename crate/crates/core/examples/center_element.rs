//! The determinant element of the coefficient algebra commutes with every
//! generator; the variants without normalisation or dressing do not.

use elliptic_center::algebra::coeffs::PROBE_POINTS;
use elliptic_center::algebra::{check_center_commutes, CenterForm, Env, Eq24Reading, ProbeBrackets};
use elliptic_center::qdet::calibrate;
use elliptic_center::sampling::SampleStream;
use elliptic_center::{ModularParams, C64};

fn main() -> elliptic_center::Result<()> {
    for n in [2, 3] {
        let p = ModularParams::defaults(n)?;
        let (rep, _) = calibrate(&p)?;
        let br = ProbeBrackets { probe: &rep, z_ref: PROBE_POINTS[0] };
        let env = Env::new(&p, C64::new(0.19, 0.03));
        let stream = SampleStream::new(11, "center");
        println!("n = {n}");
        for form in [CenterForm::Normalized, CenterForm::Literal, CenterForm::Undressed] {
            let r = check_center_commutes(n, form, Eq24Reading::GenericPair, &env, 10, &stream, 1e-9, Some(&br))?;
            println!("    {:<11} {:<12} {:.2e}", form.name(), r.verdict.name(), r.max_residual);
            if let Some(c) = r.certificate {
                println!("        {c}");
            }
        }
    }
    Ok(())
}
