use latprop::continuum::max_component_speed;
use latprop::kernels::{density_from, KernelMethod, Propagator};
use latprop::lattice::{LatticeKind, LatticeSpec, SiteIndex, Sublattice, Window};
use latprop::specfun::cq::{cq_fourier, cq_multinomial};
use latprop::C64;
use proptest::prelude::*;

fn spec_for(kind_ix: usize, delta: f64, mu: f64) -> LatticeSpec {
    let kind = LatticeKind::ALL[kind_ix % LatticeKind::ALL.len()];
    if kind.single_species() {
        LatticeSpec::homogeneous(kind, delta)
    } else {
        LatticeSpec::with_gap(kind, delta, mu).unwrap()
    }
}

fn window(spec: &LatticeSpec, t: f64) -> Window {
    let vt = max_component_speed(spec).unwrap() * t;
    Window::centered(spec.kind, (vt + 10.0 * vt.cbrt() + 10.0).ceil() as i64)
}

fn site(kind: LatticeKind, n1: i64, n2: i64, b: bool) -> SiteIndex {
    match kind {
        LatticeKind::Hexagonal => SiteIndex::hex(n1, n2, if b { Sublattice::B } else { Sublattice::A }),
        k if k.dim() == 1 => SiteIndex::at(k, n1, 0),
        k => SiteIndex::at(k, n1, n2),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn columns_are_normalised(kind in 0usize..6, delta in 0.5f64..1.5, mu in 0.0f64..1.5, ti in 0usize..4) {
        let t = [0.5, 1.0, 2.0, 5.0][ti];
        let spec = spec_for(kind, delta, mu);
        let prop = Propagator::new(spec, t, KernelMethod::default_for(&spec)).unwrap();
        let total: f64 = density_from(&prop, &site(spec.kind, 0, 0, false), &window(&spec, t)).unwrap().values().sum();
        prop_assert!((total - 1.0).abs() <= 1e-8, "{}: {total}", spec.kind);
    }

    #[test]
    fn composition_in_time(kind in 0usize..6, mu in 0.0f64..1.0, d1 in -2i64..=2, d2 in -2i64..=2, b in any::<bool>()) {
        let (t1, t2) = (0.7, 1.3);
        let spec = spec_for(kind, 1.0, mu);
        let k = spec.kind;
        let m = KernelMethod::default_for(&spec);
        let (p1, p2, p12) = (
            Propagator::new(spec, t1, m).unwrap(),
            Propagator::new(spec, t2, m).unwrap(),
            Propagator::new(spec, t1 + t2, m).unwrap(),
        );
        let a = site(k, d1, d2, b);
        let src = site(k, 0, 0, false);
        let composed: C64 = p2
            .column(&src, &window(&spec, t1 + t2))
            .unwrap()
            .iter()
            .map(|(mid, k2)| p1.amplitude(&a, mid).unwrap() * k2)
            .sum();
        prop_assert!((composed - p12.amplitude(&a, &src).unwrap()).norm() <= 1e-8);
    }

    #[test]
    fn translation_invariance(kind in 0usize..6, mu in 0.0f64..1.0, t in 0.1f64..3.0,
                              d in (-4i64..=4, -4i64..=4), shift in (-6i64..=6, -6i64..=6), b in any::<bool>()) {
        let spec = spec_for(kind, 1.0, mu);
        let k = spec.kind;
        let prop = Propagator::new(spec, t, KernelMethod::default_for(&spec)).unwrap();
        // dimer cells span two sites and rows two rows, so shifts keep parity
        let (s1, s2) = match k {
            LatticeKind::Dimer => (2 * shift.0, 0),
            LatticeKind::SquareRowAlternating => (shift.0, 2 * shift.1),
            _ => shift,
        };
        let a = site(k, d.0, d.1, b);
        let o = site(k, 0, 0, false);
        let a2 = site(k, d.0 + s1, d.1 + s2, b);
        let o2 = site(k, s1, s2, false);
        let (x, y) = (prop.amplitude(&a, &o).unwrap(), prop.amplitude(&a2, &o2).unwrap());
        prop_assert!((x - y).norm() <= 1e-13, "{k}: {x} vs {y}");
    }

    #[test]
    fn cq_routes_agree(q in 0usize..=12, m in -14i64..=14, n in -14i64..=14) {
        let a = cq_multinomial(q, m, n);
        prop_assert!((a - cq_fourier(q, m, n)).norm() <= 1e-10);
        let qi = q as i64;
        if m.abs() > qi || n.abs() > qi || (m - n).abs() > qi {
            prop_assert_eq!(a, C64::new(0.0, 0.0));
        }
    }
}
