//! Cross checks between the homotopy solver, the sign-pattern enumeration
//! oracle, and the fixed-lambda coordinate-descent solver.

use lasso_lab_core::dd::Dd;
use lasso_lab_core::gen::{gen_adversarial, gen_gaussian};
use lasso_lab_core::homotopy::{lambda_max, solve_path, SolveOpts};
use lasso_lab_core::kkt::kkt_check;
use lasso_lab_core::mat::{dot, norm2, promote};
use lasso_lab_core::oracle::{enumerate_sign_patterns, grid_solve};
use lasso_lab_core::path::path_slopes;
use lasso_lab_core::scalar::PrecisionMode;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Homotopy and enumeration agree exactly in pattern sequence, and to 1e-9
/// relative in breakpoints, on 100 seeded random instances with d in 2..=5.
#[test]
fn homotopy_matches_enumeration_on_random_instances() {
    let mut checked = 0;
    for seed in 0..100u64 {
        let d = 2 + (seed % 4) as usize;
        let inst = gen_gaussian(d + 3, d, 1000 + seed).unwrap();
        let hom = solve_path::<f64>(&inst, &SolveOpts::default()).unwrap();
        let oracle = enumerate_sign_patterns::<f64>(&inst).unwrap();
        assert_eq!(
            hom.sign_sequence(),
            oracle.sign_sequence(),
            "sign sequences differ at seed {seed}"
        );
        for (h, o) in hom.breakpoints().iter().zip(oracle.breakpoints()) {
            assert!(rel_close(*h, o, 1e-9), "seed {seed}: breakpoint {h} vs {o}");
        }
        checked += 1;
    }
    assert_eq!(checked, 100);
}

/// The adversarial d = 4 instance: both routes give exactly 41 segments and
/// the same pattern sequence; lambda_max equals the largest breakpoint found
/// by the oracle.
#[test]
fn adversarial_d4_oracle_cross_check() {
    let inst = gen_adversarial(4, PrecisionMode::Extended).unwrap();
    let hom = solve_path::<Dd>(&inst, &SolveOpts::default()).unwrap();
    let oracle = enumerate_sign_patterns::<Dd>(&inst).unwrap();
    assert_eq!(hom.count(), 41);
    assert_eq!(oracle.count(), 41);
    assert_eq!(hom.sign_sequence(), oracle.sign_sequence());
    for (h, o) in hom.breakpoints().iter().zip(oracle.breakpoints()) {
        assert!(rel_close(h.to_f64(), o.to_f64(), 1e-9));
    }
    let first_bp = oracle.breakpoints()[0].to_f64();
    assert!(rel_close(lambda_max(&inst), first_bp, 1e-12));
}

/// grid_solve agrees with eval_path at 20 lambdas per instance.
#[test]
fn grid_solve_matches_eval_path() {
    for seed in 0..5u64 {
        let inst = gen_gaussian(9, 5, 300 + seed).unwrap();
        let path = solve_path::<f64>(&inst, &SolveOpts::default()).unwrap();
        let lmax = lambda_max(&inst);
        for k in 1..=20 {
            let lam = lmax * k as f64 / 21.0;
            let w_cd = grid_solve(&inst, lam, 1e-10, 10_000).unwrap();
            let w_path = path.eval(lam).unwrap();
            for (a, b) in w_cd.iter().zip(&w_path) {
                assert!((a - b).abs() < 1e-7, "seed {seed} lambda {lam}: {a} vs {b}");
            }
        }
    }
}

/// Path self consistency at segment midpoints on 100 random instances.
#[test]
fn midpoints_pass_kkt_on_random_instances() {
    for seed in 0..100u64 {
        let d = 3 + (seed % 3) as usize;
        let inst = gen_gaussian(d + 4, d, 7000 + seed).unwrap();
        let path = solve_path::<f64>(&inst, &SolveOpts::default()).unwrap();
        for seg in &path.segments {
            let probe = seg.probe_lambda();
            let w = seg.eval(probe);
            let rep = kkt_check::<f64>(&inst, probe, &w, 1e-8);
            assert!(rep.pass(), "seed {seed}: violation {}", rep.max_violation);
        }
    }
}

/// Structural invariants along random paths: strictly decreasing
/// breakpoints, one-coordinate steps, feasible residual and correlation,
/// nonincreasing l1 norm, unique sign patterns.
#[test]
fn path_invariants_on_random_instances() {
    for seed in 0..40u64 {
        let d = 2 + (seed % 5) as usize;
        let inst = gen_gaussian(d + 3, d, 40_000 + seed).unwrap();
        let path = solve_path::<f64>(&inst, &SolveOpts::default()).unwrap();
        let bp = path.breakpoints();
        for pair in bp.windows(2) {
            assert!(pair[0] > pair[1], "seed {seed}: breakpoints not decreasing");
        }
        let seq = path.sign_sequence();
        for pair in seq.windows(2) {
            let diff = pair[0].iter().zip(&pair[1]).filter(|(a, b)| a != b).count();
            assert_eq!(diff, 1, "seed {seed}: adjacent patterns differ by {diff}");
        }
        let mut seen = std::collections::HashSet::new();
        for s in &seq {
            assert!(seen.insert(s.clone()), "seed {seed}: repeated pattern");
        }

        let y_norm = norm2(&inst.y);
        let mut prev_l1 = f64::NEG_INFINITY;
        // Walk lambdas upward so the l1 norm must decrease.
        let lmax = lambda_max(&inst);
        for k in (1..=30).rev() {
            let lam = lmax * k as f64 / 30.0 * 0.999;
            let w = path.eval(lam).unwrap();
            let fit = inst.x.matvec(&w);
            let resid: Vec<f64> = fit.iter().zip(&inst.y).map(|(f, t)| f - t).collect();
            assert!(norm2(&resid) <= y_norm * (1.0 + 1e-12));
            let u = inst.x.tr_matvec(&resid);
            for ui in &u {
                assert!(ui.abs() <= lam * (1.0 + 1e-9), "seed {seed}: |u| > lambda");
            }
            // l1 is nonincreasing in lambda: the previous (larger-lambda)
            // value must be <= this one.
            let l1: f64 = w.iter().map(|v| v.abs()).sum();
            assert!(
                prev_l1 <= l1 + 1e-10,
                "seed {seed}: l1 increased with smaller lambda"
            );
            prev_l1 = l1;
        }
    }
}

/// Slopes from path_slopes match central finite differences of eval_path
/// inside segments, and the deterministic Lipschitz bound holds.
#[test]
fn slopes_match_finite_differences() {
    for seed in 0..10u64 {
        let inst = gen_gaussian(8, 5, 90_000 + seed).unwrap();
        let path = solve_path::<f64>(&inst, &SolveOpts::default()).unwrap();
        let x = &inst.x;
        let slopes = path_slopes(x, &path);
        for (k, seg) in path.segments.iter().enumerate() {
            if !seg.lambda_hi.is_finite() || seg.lambda_hi - seg.lambda_lo < 1e-6 {
                continue;
            }
            let mid = (seg.lambda_hi + seg.lambda_lo) / 2.0;
            let h = (seg.lambda_hi - seg.lambda_lo) / 10.0;
            let wp = path.eval(mid + h).unwrap();
            let wm = path.eval(mid - h).unwrap();
            let mut max_slope = 0.0f64;
            for (p, m) in wp.iter().zip(&wm) {
                max_slope = max_slope.max(((p - m) / (2.0 * h)).abs());
            }
            assert!(
                (max_slope - slopes.per_segment_w[k]).abs()
                    <= 1e-6 * slopes.per_segment_w[k].max(1.0),
                "seed {seed} seg {k}: fd {max_slope} vs slope {}",
                slopes.per_segment_w[k]
            );
        }
        // L_w <= sqrt(d)/alpha^2 and L_u <= beta^2 sqrt(d)/alpha^2.
        let (alpha, beta) = lasso_lab_core::svd::extremal_singular_values(x);
        let sqrt_d = (inst.d() as f64).sqrt();
        assert!(slopes.l_w <= sqrt_d / (alpha * alpha) * (1.0 + 1e-9));
        assert!(slopes.l_u <= beta * beta * sqrt_d / (alpha * alpha) * (1.0 + 1e-9));
    }
}

/// Identity design: L_w = 1 (unit slopes).
#[test]
fn identity_design_unit_slopes() {
    let inst = lasso_lab_core::instance::ProblemInstance::new(
        lasso_lab_core::mat::DenseMatrix::identity(4),
        vec![0.9, 0.7, 0.5, 0.3],
        Default::default(),
    )
    .unwrap();
    let path = solve_path::<f64>(&inst, &SolveOpts::default()).unwrap();
    let slopes = path_slopes(&inst.x, &path);
    assert!((slopes.l_w - 1.0).abs() < 1e-12);
}

/// Scaling y by 1/c rescales breakpoints by 1/c and preserves the count.
#[test]
fn segment_count_invariant_under_target_scaling() {
    for seed in 0..10u64 {
        let base = gen_gaussian(8, 4, 600 + seed).unwrap();
        let mut scaled = base.clone();
        for v in scaled.y.iter_mut() {
            *v *= 3.0;
        }
        scaled.meta.normalized = false;
        let p1 = solve_path::<f64>(&base, &SolveOpts::default()).unwrap();
        let p2 = solve_path::<f64>(&scaled, &SolveOpts::default()).unwrap();
        assert_eq!(p1.count(), p2.count(), "seed {seed}");
        assert_eq!(p1.sign_sequence(), p2.sign_sequence());
        for (b1, b2) in p1.breakpoints().iter().zip(p2.breakpoints()) {
            assert!(rel_close(b1 * 3.0, b2, 1e-9));
        }
    }
}

/// Standard and extended agree to 10+ digits on well-conditioned instances.
#[test]
fn precision_modes_agree_on_well_conditioned_instances() {
    for seed in 0..10u64 {
        let inst = gen_gaussian(10, 4, 81_000 + seed).unwrap();
        let std = solve_path::<f64>(&inst, &SolveOpts::default()).unwrap();
        let ext = solve_path::<Dd>(&inst, &SolveOpts::default()).unwrap();
        assert_eq!(std.count(), ext.count());
        assert_eq!(std.sign_sequence(), ext.sign_sequence());
        for (a, b) in std.breakpoints().iter().zip(ext.breakpoints()) {
            assert!(rel_close(*a, b.to_f64(), 1e-10));
        }
    }
}

/// Oracle pattern count equals segment count (each valid pattern owns
/// exactly one interval), and equals the homotopy count.
#[test]
fn valid_pattern_count_equals_segment_count() {
    for seed in 0..20u64 {
        let d = 3 + (seed % 2) as usize;
        let inst = gen_gaussian(d + 2, d, 52_000 + seed).unwrap();
        let oracle = enumerate_sign_patterns::<f64>(&inst).unwrap();
        let hom = solve_path::<f64>(&inst, &SolveOpts::default()).unwrap();
        assert_eq!(oracle.count(), hom.count());
        let mut pats = std::collections::HashSet::new();
        for s in oracle.sign_sequence() {
            assert!(pats.insert(s));
        }
    }
}

/// The mid-segment solution of the path solves the fixed-lambda problem
/// found independently by coordinate descent, and both satisfy the
/// optimality conditions computed from first principles.
#[test]
fn crosscheck_kkt_from_first_principles() {
    let inst = gen_gaussian(7, 4, 4242).unwrap();
    let path = solve_path::<f64>(&inst, &SolveOpts::default()).unwrap();
    let seg = &path.segments[path.count() / 2];
    let lam = seg.probe_lambda();
    let w = seg.eval(lam);
    // u = X^T (X w - y) recomputed manually.
    let fit = inst.x.matvec(&w);
    let resid: Vec<f64> = fit.iter().zip(&inst.y).map(|(f, t)| f - t).collect();
    for (j, &wj) in w.iter().enumerate() {
        let u_j = dot(inst.x.col(j), &resid);
        if wj != 0.0 {
            assert!((u_j + lam * wj.signum()).abs() < 1e-10);
        } else {
            assert!(u_j.abs() <= lam * (1.0 + 1e-12));
        }
    }
    let ws = promote::<f64>(&w);
    assert!(kkt_check::<f64>(&inst, lam, &ws, 1e-10).pass());
}
