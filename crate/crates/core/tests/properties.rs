use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use floorcone::positivity::{is_ample_cone, is_big, is_nef};
use floorcone::surface::Predicate;
use floorcone::{QuadExt, RDivisor, SurfaceModel, ZDivisor};

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn quad() -> impl Strategy<Value = QuadExt> {
    (-40i64..40, 1i64..9, -40i64..40, 1i64..9).prop_map(|(a, b, c, d)| QuadExt::new(ratio(a, b), ratio(c, d), 2))
}

fn surface() -> impl Strategy<Value = SurfaceModel> {
    prop_oneof![
        (0i64..5).prop_map(|e| SurfaceModel::hirzebruch(e).unwrap()),
        Just(SurfaceModel::projective_plane()),
    ]
}

fn divisor_on(s: &SurfaceModel, raw: &[QuadExt]) -> RDivisor {
    RDivisor::from_coords(s, &raw[..s.rank()]).unwrap()
}

proptest! {
    #[test]
    fn field_laws(x in quad(), y in quad(), z in quad()) {
        prop_assert_eq!(x.try_add(&y).unwrap(), y.try_add(&x).unwrap());
        prop_assert_eq!(x.try_mul(&y).unwrap(), y.try_mul(&x).unwrap());
        let lhs = x.try_mul(&y.try_add(&z).unwrap()).unwrap();
        let rhs = x.try_mul(&y).unwrap().try_add(&x.try_mul(&z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(x.try_mul(&y).unwrap().norm(), x.norm() * y.norm());
        if !x.is_zero() {
            prop_assert_eq!(x.try_mul(&x.try_inv().unwrap()).unwrap(), QuadExt::one());
        }
    }

    #[test]
    fn floor_brackets_value(x in quad()) {
        let fl = QuadExt::from_bigint(x.floor());
        prop_assert!(fl <= x);
        prop_assert!(x < fl.try_add(&QuadExt::one()).unwrap());
        let fr = x.frac();
        prop_assert!(!fr.is_negative() && fr < QuadExt::one());
        prop_assert_eq!(x.sign(), x.to_f64_approx().partial_cmp(&0.0).unwrap());
    }

    #[test]
    fn nef_matches_generator_pairings(s in surface(), raw in prop::collection::vec(quad(), 2)) {
        let d = divisor_on(&s, &raw);
        let coords = d.coords(&s).unwrap();
        let direct = s.mori_generators().iter().all(|g| {
            let row = s.pairing_row(&g.class_coords);
            let mut acc = QuadExt::zero();
            for (c, r) in coords.iter().zip(row) {
                acc = acc.try_add(&c.scale_int(r)).unwrap();
            }
            !acc.is_negative()
        });
        prop_assert_eq!(is_nef(&s, &d).unwrap().holds, direct);
    }

    #[test]
    fn positivity_is_scale_invariant(
        s in surface(),
        raw in prop::collection::vec(quad(), 2),
        n in 1i64..20,
        m in 1i64..20,
    ) {
        let d = divisor_on(&s, &raw);
        let c = QuadExt::new(ratio(n, m), ratio(0, 1), 2);
        let cd = d.scale(&c).unwrap();
        prop_assert_eq!(is_ample_cone(&s, &d).unwrap().holds, is_ample_cone(&s, &cd).unwrap().holds);
        prop_assert_eq!(is_nef(&s, &d).unwrap().holds, is_nef(&s, &cd).unwrap().holds);
        prop_assert_eq!(is_big(&s, &d).unwrap().holds, is_big(&s, &cd).unwrap().holds);
    }

    #[test]
    fn ample_implies_nef_and_big(s in surface(), raw in prop::collection::vec(quad(), 2)) {
        let d = divisor_on(&s, &raw);
        if is_ample_cone(&s, &d).unwrap().holds {
            prop_assert!(is_nef(&s, &d).unwrap().holds);
            prop_assert!(is_big(&s, &d).unwrap().holds);
        }
    }
}

/// Each predicate sees `normal . z` only through a clamp to `[lo - 1, hi + 1]`.
#[test]
fn predicates_depend_only_on_clamped_guards() {
    let mut surfaces: Vec<SurfaceModel> = (0..5).map(|e| SurfaceModel::hirzebruch(e).unwrap()).collect();
    surfaces.push(SurfaceModel::projective_plane());
    let preds = [Predicate::VeryAmple, Predicate::GloballyGenerated, Predicate::Effective, Predicate::Vanishing];
    for s in &surfaces {
        let classes: Vec<ZDivisor> = if s.rank() == 2 {
            (-25..=25).flat_map(|a| (-25..=25).map(move |b| ZDivisor::new(vec![a, b]))).collect()
        } else {
            (-60..=60).map(|d| ZDivisor::new(vec![d])).collect()
        };
        for pred in preds {
            let guards = s.guards(pred).unwrap();
            let mut seen: HashMap<Vec<i64>, bool> = HashMap::new();
            for z in &classes {
                let key: Vec<i64> = guards.iter().map(|g| z.dot(&g.normal).clamp(g.lo - 1, g.hi + 1)).collect();
                let v = s.evaluate(pred, z).unwrap();
                if let Some(prev) = seen.insert(key.clone(), v) {
                    assert_eq!(prev, v, "{} {pred:?} at {key:?}", s.name());
                }
            }
        }
    }
}
