use adiabatic_search::schedule::Table;
use adiabatic_search::{
    adiabaticity_ratio, gap, linear_schedule, local_s_of_time, local_time_of_s, local_total_time,
    Schedule,
};
use proptest::prelude::*;

/// Adaptive 7/15-point Gauss-Kronrod quadrature, independent of the closed
/// form and of the crate's own quadrature.
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel: f64, depth: u32) -> f64 {
    const XK: [f64; 8] = [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ];
    const WK: [f64; 8] = [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ];
    const WG: [f64; 4] = [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ];
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let mut kronrod = WK[7] * f(c);
    let mut gauss = WG[3] * f(c);
    for i in 0..7 {
        let dx = hw * XK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    kronrod *= hw;
    gauss *= hw;
    if depth == 0 || (kronrod - gauss).abs() <= rel * kronrod.abs() {
        return kronrod;
    }
    gauss_kronrod(f, a, c, rel, depth - 1) + gauss_kronrod(f, c, b, rel, depth - 1)
}

fn quadrature_total_time(n: usize, eps: f64) -> f64 {
    let nf = n as f64;
    let integrand = |s: f64| 1.0 / (eps * (1.0 - 4.0 * (nf - 1.0) / nf * s * (1.0 - s)));
    // split at the gap minimum, where the integrand peaks
    gauss_kronrod(&integrand, 0.0, 0.5, 1e-11, 40) + gauss_kronrod(&integrand, 0.5, 1.0, 1e-11, 40)
}

#[test]
fn closed_form_matches_quadrature() {
    for n in [2usize, 64, 1024] {
        for eps in [0.2, 0.1, 0.02] {
            let exact = local_total_time(n, eps).unwrap();
            let oracle = quadrature_total_time(n, eps);
            assert!(
                ((exact - oracle) / oracle).abs() < 1e-8,
                "N={n} eps={eps}: {exact} vs {oracle}"
            );
        }
    }
    assert!((quadrature_total_time(64, 0.1) - 116.55162414955426).abs() < 1e-8);
}

#[test]
fn partial_times_match_quadrature() {
    let (n, eps) = (64usize, 0.1);
    let nf = n as f64;
    let integrand = |s: f64| 1.0 / (eps * (1.0 - 4.0 * (nf - 1.0) / nf * s * (1.0 - s)));
    for s in [0.1, 0.3, 0.5, 0.77] {
        let oracle = gauss_kronrod(&integrand, 0.0, s, 1e-11, 40);
        let exact = local_time_of_s(s, n, eps).unwrap();
        assert!((exact - oracle).abs() < 1e-9 * oracle.max(1.0));
    }
}

#[test]
fn round_trip_on_grid() {
    for n in [2usize, 64, 1 << 20] {
        for k in 0..=1000 {
            let s = k as f64 / 1000.0;
            let t = local_time_of_s(s, n, 0.1).unwrap();
            let back = local_s_of_time(t, n, 0.1).unwrap();
            assert!((back - s).abs() < 1e-10, "N={n} s={s} back={back}");
        }
    }
}

#[test]
fn inverse_identity_in_time() {
    let total = local_total_time(64, 0.1).unwrap();
    for k in 0..=1000 {
        let t = total * k as f64 / 1000.0;
        let s = local_s_of_time(t, 64, 0.1).unwrap();
        assert!((local_time_of_s(s, 64, 0.1).unwrap() - t).abs() < 1e-10);
    }
}

#[test]
fn time_symmetry() {
    for n in [2usize, 64, 4096] {
        let total = local_total_time(n, 0.1).unwrap();
        for k in 0..=100 {
            let s = k as f64 / 100.0;
            let lhs = total - local_time_of_s(1.0 - s, n, 0.1).unwrap();
            let rhs = local_time_of_s(s, n, 0.1).unwrap();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }
}

#[test]
fn local_condition_holds_by_construction() {
    for n in [4usize, 64, 1024] {
        let eps = 0.1;
        let sch = Schedule::local_adiabatic(n, eps).unwrap();
        for k in 0..=1000 {
            let t = sch.total_time() * k as f64 / 1000.0;
            let s = sch.s_at(t).unwrap();
            let ratio = adiabaticity_ratio(s, sch.rate(t).unwrap(), n).unwrap();
            assert!(ratio <= eps * (1.0 + 1e-12), "N={n} t={t} ratio={ratio}");
            // the rate itself saturates the bound eps g^2
            let g = gap(s, n).unwrap();
            assert!((sch.rate(t).unwrap() - eps * g * g).abs() < 1e-14);
        }
    }
}

#[test]
fn total_time_approaches_asymptote_monotonically() {
    let mut prev = 0.0;
    for k in 2..=20 {
        let n = 1usize << k;
        let ratio = local_total_time(n, 0.1).unwrap() * 0.2
            / (std::f64::consts::PI * (n as f64).sqrt());
        assert!(ratio > prev && ratio < 1.0, "N={n} ratio={ratio}");
        prev = ratio;
    }
    assert!((prev - 1.0).abs() < 2e-3);
}

fn any_schedule() -> impl Strategy<Value = Schedule> {
    prop_oneof![
        (0.1f64..1000.0).prop_map(|t| linear_schedule(t).unwrap()),
        (1u32..=20, 0.01f64..0.99).prop_map(|(k, eps)| Schedule::local_adiabatic(1 << k, eps).unwrap()),
        prop::collection::vec(0.01f64..1.0, 1..12).prop_map(|steps| {
            let mut times = vec![0.0];
            let mut values = vec![0.0];
            let total: f64 = steps.iter().sum();
            let mut acc = 0.0;
            for (i, dt) in steps.iter().enumerate() {
                acc += dt;
                times.push(times[i] + dt);
                values.push(if i + 1 == steps.len() { 1.0 } else { acc / total });
            }
            let slopes = vec![5.0; times.len()];
            Schedule::tabulated(Table::new(times, values, slopes).unwrap())
        }),
    ]
}

proptest! {
    #[test]
    fn schedules_are_monotone_with_fixed_ends(sch in any_schedule(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let total = sch.total_time();
        prop_assert_eq!(sch.s_at(0.0).unwrap(), 0.0);
        prop_assert_eq!(sch.s_at(total).unwrap(), 1.0);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let s_lo = sch.s_at(lo * total).unwrap();
        let s_hi = sch.s_at(hi * total).unwrap();
        prop_assert!((0.0..=1.0).contains(&s_lo) && (0.0..=1.0).contains(&s_hi));
        prop_assert!(s_hi >= s_lo);
        prop_assert!(sch.rate(lo * total).unwrap() >= 0.0);
    }
}
