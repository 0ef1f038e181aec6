//! Read the coefficient brackets off the fundamental L-operator, test their
//! quadratic relations, and round-trip them through a JSON table.

use elliptic_center::algebra::coeffs::CoeffData;
use elliptic_center::algebra::{check_y_relations, extract_coefficients, Eq24Reading, LatticePoint, TabulatedBrackets};
use elliptic_center::qdet::calibrate;
use elliptic_center::sampling::SampleStream;
use elliptic_center::{DynWeight, ModularParams};

fn main() -> elliptic_center::Result<()> {
    let p = ModularParams::defaults(2)?;
    let (rep, _) = calibrate(&p)?;
    let stream = SampleStream::new(5, "brackets");
    let (br, ex) = extract_coefficients(&rep, 5, &stream, p.tol_residual)?;
    println!("factorised form: conforming = {}, spread {:.2e}", ex.conforming, ex.spread);

    let y = check_y_relations(&br, &p, 10, &stream, Eq24Reading::GenericPair)?;
    println!(
        "relations: same lower {:.2e}, same upper {:.2e}, three-term {:.2e}",
        y.same_lower.max_residual, y.same_upper.max_residual, y.three_term.max_residual
    );

    let a = DynWeight::new(vec![1, -1]);
    let points: Vec<LatticePoint> = (0..2).map(|h| LatticePoint::new(a.clone(), a.shifted(h))).collect();
    let table = TabulatedBrackets::tabulate(&br, &points)?;
    let json = table.to_json()?;
    let back = TabulatedBrackets::from_json(&json)?;
    println!("{} tabulated entries, first bracket {:.10}", back.len(), back.bracket(&points[0], 0, 0)?);
    println!("{}", &json[..json.len().min(240)]);
    Ok(())
}
