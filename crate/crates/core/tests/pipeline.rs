use std::path::PathBuf;

use presym::defs::Definition;
use presym::pipeline::{applicable, derive, run, structure_of, Direction, Suite};
use presym::presym::{check_presymplectic, PreSymStructure};
use presym::{fixtures, DiffExpr, Status};

fn fixture(name: &str) -> Definition {
    Definition::parse(&fixtures::get(name).unwrap()).unwrap()
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn shipped_files_match_the_registry() {
    for name in fixtures::NAMES {
        let on_disk = std::fs::read_to_string(fixture_dir().join(format!("{name}.psa"))).unwrap();
        assert_eq!(on_disk, fixtures::get(name).unwrap(), "{name}");
    }
    let broken = std::fs::read_to_string(fixture_dir().join("broken_sphere.psa")).unwrap();
    assert_eq!(broken, fixtures::broken_sphere());
    assert_eq!(fixtures::NAMES.len(), 8);
}

#[test]
fn suites_select_their_checks() {
    let def = fixture("lsa2");
    let rep = run(&def, Suite::Lsa).unwrap();
    assert!(rep.checks.iter().all(|c| c.id.starts_with("lsa.")));
    let rep = run(&def, Suite::Exact).unwrap();
    assert_eq!(rep.status("exact.rank"), Some(Status::Skipped));
    assert!(rep.passed());
    assert!("bogus".parse::<Suite>().is_err());
}

#[test]
fn json_reports_are_deterministic() {
    for name in fixtures::NAMES {
        let a = run(&fixture(name), Suite::All).unwrap().to_json(false);
        let b = run(&fixture(name), Suite::All).unwrap().to_json(false);
        assert_eq!(a, b, "{name}");
        assert!(!a.contains("\"seconds\""));
    }
}

#[test]
fn derive_round_trips_through_text() {
    for name in fixtures::NAMES {
        let def = fixture(name);
        for dir in [
            Direction::ToStar,
            Direction::ToBracket,
            Direction::PseudoSemidirect,
            Direction::Twist,
        ] {
            if !applicable(&def, dir) {
                continue;
            }
            let out = derive(&def, dir).unwrap();
            let text = out.to_psa();
            let reread = Definition::parse(&text).unwrap();
            assert_eq!(reread.to_psa(), text, "{name} {dir}");
            let rep = run(&reread, Suite::All).unwrap();
            assert!(rep.passed(), "{name} {dir}\n{}", rep.to_text(false));
            let a = structure_of(&def).unwrap().unwrap();
            let b = structure_of(&reread).unwrap().unwrap();
            assert_eq!(a.star_table(), b.star_table(), "{name} {dir}");
        }
    }
}

fn with_star_entry(e: &PreSymStructure, a: usize, b: usize, c: usize) -> PreSymStructure {
    let mut star = e.star_table().to_vec();
    star[a][b][c] += &DiffExpr::one();
    PreSymStructure::new(
        e.ctx().clone(),
        e.frame().to_vec(),
        e.anchor().clone(),
        star,
        e.pairing().clone(),
    )
    .unwrap()
}

#[test]
fn sampled_star_perturbations_fail() {
    // The acceptance target enumerates every entry; here every seventh.
    for name in fixtures::NAMES {
        let e = structure_of(&fixture(name)).unwrap().unwrap();
        let r = e.rank();
        for t in (0..r * r * r).step_by(7) {
            let p = with_star_entry(&e, t / (r * r), (t / r) % r, t % r);
            assert!(
                !check_presymplectic(&p).unwrap().passed(),
                "{name} entry {t}"
            );
        }
    }
}

#[test]
fn anchor_perturbation_can_stay_valid() {
    // On R^4 with the zero product any anchor of commuting fields works,
    // so perturbing anchor entries need not break the structure.
    let e = structure_of(&fixture("r2n")).unwrap().unwrap();
    let mut anchor = e.anchor().clone();
    anchor.set(0, 1, e.ctx().coord(0));
    let p = PreSymStructure::new(
        e.ctx().clone(),
        e.frame().to_vec(),
        anchor,
        e.star_table().to_vec(),
        e.pairing().clone(),
    )
    .unwrap();
    assert!(check_presymplectic(&p).unwrap().passed());
}

#[test]
fn broken_sphere_reports_witnesses() {
    let def = Definition::parse(&fixtures::broken_sphere()).unwrap();
    let rep = run(&def, Suite::Algebroid).unwrap();
    let c = rep.get("algebroid.anchor_morphism").unwrap();
    assert_eq!(c.status, Status::Fail);
    assert!(!c.witnesses.is_empty());
    assert!(rep
        .to_text(false)
        .contains("[fail] algebroid.anchor_morphism"));
}
