mod common;

use std::sync::OnceLock;

use dpdelta::config::{intersect, validate, DivisorClass, SurfaceConfig};
use dpdelta::piecewise::PiecewisePoly;
use dpdelta::poly::Poly;
use dpdelta::zariski::{negative_part_at, parametric_decompose};
use dpdelta::Rat;
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rat> {
    (-60i64..60, 1i64..25).prop_map(|(n, d)| Rat::new(n, d))
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    rat().prop_filter("nonzero", |x| !x.is_zero())
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(rat(), 0..5).prop_map(Poly::new)
}

fn instances() -> &'static [common::FlagInstance] {
    static CELL: OnceLock<Vec<common::FlagInstance>> = OnceLock::new();
    CELL.get_or_init(common::flag_instances)
}

/// Reorder the curve basis; curve-keyed data (points, discrepancies) is unaffected.
fn permute(cfg: &SurfaceConfig, perm: &[usize]) -> SurfaceConfig {
    let mut out = cfg.clone();
    out.curves = perm.iter().map(|&i| cfg.curves[i].clone()).collect();
    out.anti_k = perm.iter().map(|&i| cfg.anti_k[i].clone()).collect();
    out.gram = perm.iter().map(|&i| perm.iter().map(|&j| cfg.gram[i][j].clone()).collect()).collect();
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn rationals_form_a_field(a in rat(), b in rat(), c in rat(), z in nonzero_rat()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a / &z) * &z, a.clone());
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(a.to_string().parse::<Rat>().unwrap(), a);
    }

    #[test]
    fn polynomial_calculus_is_exact(p in poly(), q in poly(), a in rat(), b in rat(), c in rat()) {
        prop_assert_eq!(p.antiderivative().derivative(), p.clone());
        prop_assert_eq!(p.integrate(&a, &b) + p.integrate(&b, &c), p.integrate(&a, &c));
        prop_assert_eq!((&p * &q).eval(&a), p.eval(&a) * q.eval(&a));
        prop_assert_eq!(p.integrate(&a, &b), p.antiderivative().eval(&b) - p.antiderivative().eval(&a));
    }

    #[test]
    fn piecewise_integrals_split_at_any_point(
        p in poly(), q in poly(), mid in 1i64..9, cut in 0i64..10,
    ) {
        let mid = Rat::new(mid, 10);
        let pp = PiecewisePoly::new(vec![Rat::zero(), mid.clone(), Rat::one()], vec![p.clone(), q.clone()]).unwrap();
        let cut = Rat::new(cut, 10);
        prop_assert_eq!(pp.integrate_all(), p.integrate(&Rat::zero(), &mid) + q.integrate(&mid, &Rat::one()));
        prop_assert_eq!(
            pp.integrate(&Rat::zero(), &cut).unwrap() + pp.integrate(&cut, &Rat::one()).unwrap(),
            pp.integrate_all()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn intersection_is_symmetric_and_bilinear(
        idx in any::<prop::sample::Index>(), seed in prop::collection::vec(rat(), 64), k in rat(),
    ) {
        let inst = idx.get(instances());
        let cfg = &inst.config;
        let n = cfg.n();
        let x = DivisorClass(seed[..n].to_vec());
        let y = DivisorClass(seed[n..2 * n].to_vec());
        let z = DivisorClass(seed[2 * n..3 * n].to_vec());
        let xy = intersect(cfg, &x, &y).unwrap();
        prop_assert_eq!(&xy, &intersect(cfg, &y, &x).unwrap());
        prop_assert_eq!(
            intersect(cfg, &x.add(&z.scale(&k)), &y).unwrap(),
            xy + k * intersect(cfg, &z, &y).unwrap()
        );
    }

    #[test]
    fn decomposition_ignores_basis_order(idx in any::<prop::sample::Index>(), shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let inst = idx.get(instances());
        let mut perm: Vec<usize> = (0..inst.config.n()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle));
        let a = parametric_decompose(&inst.config, &inst.flag).unwrap();
        let b = parametric_decompose(&permute(&inst.config, &perm), &inst.flag).unwrap();
        prop_assert_eq!(&a.tau, &b.tau);
        prop_assert_eq!(a.p_sq(), b.p_sq());
        for c in &inst.config.curves {
            prop_assert_eq!(a.n_coeff(&c.name), b.n_coeff(&c.name), "{}", c.name);
        }
    }

    #[test]
    fn negative_part_scales_linearly(
        idx in any::<prop::sample::Index>(), t in 0i64..100, lambda in 1i64..7,
    ) {
        let inst = idx.get(instances());
        let d = parametric_decompose(&inst.config, &inst.flag).unwrap();
        let v = &d.tau * &Rat::new(t, 100);
        let dv = inst.config.sweep_class(&inst.flag, &v).unwrap();
        let lam = Rat::int(lambda);
        let n1 = negative_part_at(&inst.config, &dv).unwrap();
        let n2 = negative_part_at(&inst.config, &dv.scale(&lam)).unwrap();
        prop_assert_eq!(&n1.support, &n2.support);
        for (a, b) in n1.coeffs.iter().zip(&n2.coeffs) {
            prop_assert_eq!(&(a * &lam), b);
        }
        prop_assert_eq!(n1, d.negative_part(&v).unwrap());
    }

    #[test]
    fn gram_mutations_are_detected(
        idx in any::<prop::sample::Index>(), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), eps in nonzero_rat(),
    ) {
        let cfg = &idx.get(instances()).config;
        let n = cfg.n();
        let (i, j) = (i.index(n), j.index(n));
        let mut m = cfg.clone();
        m.gram[i][j] = &m.gram[i][j] + &eps;
        let rep = validate(&m);
        prop_assert!(!rep.ok());
        if i == j {
            prop_assert!(rep.failed("gram diagonal"));
        } else {
            prop_assert!(rep.failed("gram symmetric"));
        }
    }
}

#[test]
fn basis_vectors_recover_gram_entries() {
    let cfg = &instances()[0].config;
    let n = cfg.n();
    let e = |i: usize| DivisorClass((0..n).map(|k| if k == i { Rat::one() } else { Rat::zero() }).collect());
    for i in 0..n {
        for j in 0..n {
            assert_eq!(intersect(cfg, &e(i), &e(j)).unwrap(), cfg.gram[i][j]);
        }
    }
}
