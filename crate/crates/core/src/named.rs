//! Named formulas and hypersequents, and builders for the shipped golden
//! derivations.

use crate::calculus::{default_limits, search, CalculusSpec, Derivation, RuleId, System};
use crate::decide::far_step;
use crate::syntax::{parse_formula, parse_hypersequent, Atom, Formula, Hypersequent, Side};

pub const C: &str = "=> ~[]~[](p & q) | []( ~[]p | []~[]q )";
pub const C_HYPER: &str = "[]~[](p & q) => // []p => // []q =>";
pub const J: &str = "=> p // => [](~[][]p & ~[][]q) // => q";
pub const J_PRIME: &str = "=> p // => []~[][]p & []~[][]q // => q";
pub const BOX_DIST: &str = "[]~[][]p & []~[][]q => [](~[][]p & ~[][]q)";
pub const BOX_DIST_CONVERSE: &str = "[](~[][]p & ~[][]q) => []~[][]p & []~[][]q";

/// Looks up a name (case-insensitive, `'` or `prime` suffix for J′).
pub fn named(name: &str) -> Option<Hypersequent> {
    let text = match name.to_ascii_lowercase().as_str() {
        "c" => C,
        "c-hyper" | "chyper" => C_HYPER,
        "j" => J,
        "j'" | "jprime" | "j-prime" | "j′" => J_PRIME,
        "box-dist" => BOX_DIST,
        "box-dist-converse" => BOX_DIST_CONVERSE,
        _ => return None,
    };
    Some(parse_hypersequent(text).expect("named hypersequents parse"))
}

pub fn hyper(name: &str) -> Hypersequent {
    named(name).expect("known name")
}

fn f(s: &str) -> Formula {
    parse_formula(s).expect("formula parses")
}

/// The 25-node cut-free RKB derivation of `⇒ I(J)`.
pub fn ij_derivation() -> Derivation {
    let ok = "every step of the I(J) derivation applies";
    let a = f("~[][]p & ~[][]q");
    let left = Derivation::id(&Atom::new("p"))
        .ewl()
        .ewl()
        .apply(RuleId::BoxL, 1, Some(f("[]p")))
        .and_then(|d| d.apply(RuleId::BoxL, 0, Some(f("[][]p"))))
        .and_then(|d| d.apply(RuleId::Sym, 0, None))
        .and_then(|d| d.apply(RuleId::NegR, 2, Some(f("~[][]p"))))
        .and_then(|d| d.apply(RuleId::TR, 1, Some(f("[]q"))))
        .expect(ok);
    let right = Derivation::id(&Atom::new("q"))
        .ewl()
        .apply(RuleId::BoxL, 0, Some(f("[]q")))
        .and_then(|d| d.apply(RuleId::BoxR, 0, Some(f("[]q"))))
        .map(Derivation::ewl)
        .and_then(|d| d.apply(RuleId::BoxL, 0, Some(f("[][]q"))))
        .and_then(|d| d.apply(RuleId::Sym, 0, None))
        .and_then(|d| d.apply(RuleId::NegR, 1, Some(f("~[][]q"))))
        .map(Derivation::ewl)
        .and_then(|d| d.apply(RuleId::TR, 0, Some(f("p"))))
        .expect(ok);
    let inner = f("[](~[][]p & ~[][]q) | []q");
    let whole = f("p | [] ( [](~[][]p & ~[][]q) | []q)");
    left.apply2(right, RuleId::AndR, 2, a.clone())
        .and_then(|d| d.apply(RuleId::BoxR, 1, Some(a.boxed())))
        .and_then(|d| d.apply(RuleId::OrR1, 1, Some(inner.clone())))
        .and_then(|d| d.apply(RuleId::OrR2, 1, Some(inner.clone())))
        .and_then(|d| d.apply(RuleId::BoxR, 0, Some(inner.boxed())))
        .and_then(|d| d.apply(RuleId::OrR2, 0, Some(whole.clone())))
        .and_then(|d| d.apply(RuleId::OrR1, 0, Some(whole)))
        .expect(ok)
}

/// BoxL′ from component 0 to component 2 by Cut, on
/// `□¬q ⇒ // ⇒ // q ⇒` (RK4 with Cut).
pub fn boxl_prime_simulation() -> Derivation {
    let goal = hyper_text("[]~q => // => // q =>");
    let nq = f("~q");
    let above = Derivation::id(&Atom::new("q"))
        .apply(RuleId::NegL, 0, Some(nq.clone()))
        .expect("NegL")
        .ewl()
        .ewl()
        .weaken(0, Side::Left, nq.clone().boxed());
    far_step(&goal, 0, 2, &nq, above)
}

fn hyper_text(s: &str) -> Hypersequent {
    parse_hypersequent(s).expect("hypersequent parses")
}

/// The search-found cut-free RKB proofs of □-distribution and its converse.
pub fn box_distribution_proofs() -> [Derivation; 2] {
    let spec = CalculusSpec::system(System::RKB);
    [BOX_DIST, BOX_DIST_CONVERSE].map(|g| {
        let g = hyper_text(g);
        search(&g, &spec, default_limits(&g))
            .0
            .proof()
            .cloned()
            .expect("distribution is RKB provable")
    })
}

/// File name and contents of every golden derivation.
pub fn golden_files() -> Vec<(&'static str, Derivation)> {
    let [dist, conv] = box_distribution_proofs();
    vec![
        ("ij_rkb.json", ij_derivation()),
        ("boxl_prime_rk4cut.json", boxl_prime_simulation()),
        ("box_dist_rkb.json", dist),
        ("box_dist_converse_rkb.json", conv),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::check_derivation;
    use crate::transform::translate;

    #[test]
    fn ij_derivation_checks_in_rkb_only() {
        let d = ij_derivation();
        assert_eq!(d.size(), 25);
        assert_eq!(translate(&hyper("j")).unwrap().formula, d.end().get(0).unwrap().right.iter().next().unwrap().clone());
        check_derivation(&d, &CalculusSpec::system(System::RKB)).unwrap();
        let err = check_derivation(&d, &CalculusSpec::system(System::RK)).unwrap_err();
        assert!(err.to_string().contains("Sym"), "{err}");
    }

    #[test]
    fn boxl_prime_simulation_checks() {
        let d = boxl_prime_simulation();
        assert!(d.uses(RuleId::Cut));
        check_derivation(&d, &CalculusSpec::system(System::RK4).with_cut()).unwrap();
    }

    #[test]
    fn golden_files_match_builders() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("golden");
        let bless = std::env::var_os("HYPERSEQ_BLESS").is_some();
        for (name, d) in golden_files() {
            let path = dir.join(name);
            let text = d.to_json_pretty();
            if bless {
                std::fs::create_dir_all(&dir).unwrap();
                std::fs::write(&path, &text).unwrap();
            }
            let shipped = std::fs::read_to_string(&path).unwrap();
            assert_eq!(Derivation::from_json(&shipped).unwrap(), d, "{name}");
        }
    }
}
