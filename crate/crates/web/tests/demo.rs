use subsup_web::{bound_curves_data, debate_data, tightness_data};

#[test]
fn bound_curves_endpoints() {
    let b = bound_curves_data(0.5, 2.0, 12).unwrap();
    assert_eq!(b.gamma.len(), 12);
    assert_eq!(b.gamma[0], 0.0);
    assert!((b.gamma[11] - 0.99).abs() < 1e-15);
    assert!((b.main[0] - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    assert!((b.beta[0] - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
    // c = 1/2, γ = 0: 1 − (1/2)²
    assert!((b.curv_f[0] - 0.75).abs() < 1e-15);
    assert_eq!(b.overflow_cap[0], 2.0);
    assert!(b.main.windows(2).all(|w| w[0] > w[1]));
    assert!(bound_curves_data(1.0, 1.0, 5).is_err());
}

#[test]
fn tightness_path_ends_at_closed_form() {
    let t = tightness_data(10, 0.5).unwrap();
    let expected = (1.0 - 0.9f64.powi(6)) / (1.0 - 1e-6);
    assert_eq!(t.k_prime, 6);
    assert!((t.realized - expected).abs() < 1e-12);
    assert!((t.closed_form - expected).abs() < 1e-12);
    let last = *t.path.last().unwrap();
    assert_eq!(last.1, t.realized);
    assert!(last.0 <= 1.0);
    // the next pick is u, whose cost jumps past θ
    assert!(t.overflow.unwrap().0 > 1.0);
    assert!(tightness_data(10, 0.0).is_err());
}

#[test]
fn debate_demo_curves_stay_under_frontier() {
    let d = debate_data(6, 20, 2, false, 1).unwrap();
    let names: Vec<&str> = d.curves.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["ratio-marginal", "greedy-f", "greedy-g", "ratio-fg", "random"]);
    let frontier = d.frontier.as_ref().expect("m = 6 is enumerable");
    for curve in &d.curves {
        assert_eq!(curve.points[0], (0.0, 0.0));
        for &(cost, f) in curve.points.iter().filter(|p| p.0 <= d.budget_cap) {
            let best = frontier
                .iter()
                .filter(|r| r.0 <= cost)
                .map(|r| r.1)
                .fold(0.0, f64::max);
            assert!(f <= best + 1e-9, "{} at {cost}: {f} > {best}", curve.name);
        }
    }
    assert!(debate_data(20, 10, 1, true, 0).unwrap().frontier.is_none());
}
