//! Normal ordering of generator words with the exchange relations.

use elliptic_center::algebra::elem::format_word;
use elliptic_center::algebra::{normal_form, AlgElem, Env, Eq24Reading, Generator, LatticeFn, LatticePoint};
use elliptic_center::{DynWeight, ModularParams, C64};

fn main() -> elliptic_center::Result<()> {
    let p = ModularParams::defaults(2)?;
    let env = Env::new(&p, C64::new(0.0, 0.0));
    let pt = LatticePoint::new(DynWeight::new(vec![1, 0]), DynWeight::new(vec![0, 2]));
    let g = Generator::new;
    let x = AlgElem::monomial(2, LatticeFn::one(), vec![g(1, 1), g(0, 0)]);
    for reading in [Eq24Reading::GenericPair, Eq24Reading::PaperLiteral] {
        let nf = normal_form(&x, reading);
        println!("{} -> reading {}", format_word(&[g(1, 1), g(0, 0)]), reading.name());
        for (word, coef) in nf.elem.terms() {
            println!("    {:>28.10}  {}", coef.eval(&env, &pt)?, format_word(word));
        }
        for s in &nf.stuck {
            println!("    left in place: {} {}", s.left, s.right);
        }
    }
    Ok(())
}
