//! Property tests of the structural claims over generated problems.

use proptest::prelude::*;

use semikrylov::bounds::range_energy_norm;
use semikrylov::decomposition::null_iterate_deviation;
use semikrylov::genmat::{geometric_spectrum, linear_spectrum};
use semikrylov::linalg::DEFAULT_RANK_TOL;
use semikrylov::oracle::pseudoinverse_matrix;
use semikrylov::{
    cg_bound_verify, cg_solve, cgls_bound_verify, cgls_solve, cgne_bound_verify, cgne_solve, decomposed_cg_run,
    decomposed_cg_run_consistent, make_problem, matvec, null_direction_confinement, pinv_apply_rect,
    pseudoinverse_apply, split, svd, symmetric_eig, Config, Matrix, Problem, ProblemSpec, Vec64, X0Mode,
};

const KAPPAS: [f64; 3] = [10.0, 1e2, 1e4];

fn x0_mode(i: usize) -> X0Mode {
    [X0Mode::Zero, X0Mode::RandomRange, X0Mode::RandomFull][i]
}

/// Square SPSD problem with a linear or geometric spectrum.
#[derive(Debug, Clone)]
struct SpsdCase {
    n: usize,
    rank: usize,
    kappa: f64,
    geometric: bool,
    x0: usize,
    seed: u64,
}

impl SpsdCase {
    fn spec(&self, gap: f64) -> ProblemSpec {
        let spectrum = if self.geometric {
            geometric_spectrum(self.n, self.rank, 1.0, self.kappa)
        } else {
            linear_spectrum(self.n, self.rank, 1.0, self.kappa)
        };
        ProblemSpec::spsd(self.n, spectrum, self.seed)
            .with_gap(gap)
            .with_x0(x0_mode(self.x0))
    }

    fn problem(&self, gap: f64) -> Problem<f64> {
        make_problem(&self.spec(gap)).unwrap()
    }
}

fn spsd_case() -> impl Strategy<Value = SpsdCase> {
    (4usize..=30, any::<u64>(), 0usize..3, any::<bool>(), 0usize..3).prop_flat_map(|(n, seed, k, geometric, x0)| {
        (1..n).prop_map(move |rank| SpsdCase {
            n,
            rank,
            kappa: KAPPAS[k],
            geometric,
            x0,
            seed,
        })
    })
}

/// Rectangular problem with singular values geometric from 1 down to 1/ratio.
fn rect_spec() -> impl Strategy<Value = ProblemSpec> {
    (
        2usize..=20,
        2usize..=20,
        any::<u64>(),
        prop_oneof![Just(10.0), Just(1e2)],
    )
        .prop_flat_map(|(m, n, seed, ratio)| {
            (1..=m.min(n)).prop_map(move |rank| {
                ProblemSpec::rectangular(m, n, geometric_spectrum(m.min(n), rank, 1.0, ratio), seed)
            })
        })
}

fn eig(a: &Matrix) -> semikrylov::Spectral {
    symmetric_eig(a, DEFAULT_RANK_TOL).unwrap()
}

fn rel(a: &Vec64, b: &Vec64) -> f64 {
    a.sub(b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_spectrum_roundtrips(case in spsd_case()) {
        let spec = case.spec(0.0);
        let p = case.problem(0.0);
        let d = eig(&p.a);
        prop_assert_eq!(d.rank, case.rank);
        prop_assert_eq!(p.rank, case.rank);
        for (got, want) in d.lambdas.iter().zip(&spec.spectrum) {
            prop_assert!((got - want).abs() <= 1e-10 * spec.spectrum[0]);
        }
    }

    #[test]
    fn generation_is_deterministic(case in spsd_case(), gap in 0.0f64..2.0) {
        let p = case.problem(gap);
        let q = case.problem(gap);
        prop_assert_eq!(p.a.as_slice(), q.a.as_slice());
        prop_assert_eq!(p.b.as_slice(), q.b.as_slice());
        prop_assert_eq!(p.x0.as_slice(), q.x0.as_slice());
        prop_assert_eq!(p.xstar_reference.as_slice(), q.xstar_reference.as_slice());
    }

    #[test]
    fn null_component_of_b_is_the_gap(case in spsd_case(), gap in 1e-3f64..2.0) {
        let p = case.problem(gap);
        let null = split(&eig(&p.a), &p.b).unwrap().null_part.norm();
        prop_assert!((null - gap).abs() <= 1e-12 * gap.max(1.0) * 10.0, "null {} gap {}", null, gap);
    }

    #[test]
    fn pseudoinverse_solves_consistent_systems(case in spsd_case()) {
        let p = case.problem(0.0);
        let d = eig(&p.a);
        let x = pseudoinverse_apply(&d, &p.b).unwrap();
        prop_assert!(rel(&matvec(&p.a, &x).unwrap(), &p.b) <= 1e-10);
        prop_assert!(split(&d, &x).unwrap().null_part.norm() <= 1e-12 * x.norm());
    }

    #[test]
    fn pseudoinverse_has_minimal_norm(case in spsd_case(), coeffs in prop::collection::vec(-1.0f64..1.0, 30)) {
        let p = case.problem(0.0);
        let d = eig(&p.a);
        let x = pseudoinverse_apply(&d, &p.b).unwrap();
        let mut z = semikrylov::SplitVector {
            range_part: Vec64::zeros(d.rank),
            null_part: Vec64::from_vec(coeffs[..case.n - d.rank].to_vec()),
        }
        .reassemble(&d);
        z = z.scaled(x.norm());
        prop_assert!(x.add(&z).norm() >= x.norm() - 1e-12);
    }

    #[test]
    fn cg_residuals_are_orthogonal(case in spsd_case()) {
        // isolated large eigenvalues converge early and rounding then feeds
        // them back; geometric spectra lose orthogonality well before rank steps
        let case = SpsdCase { geometric: false, ..case };
        let p = case.problem(0.0);
        let trace = cg_solve(&p.a, &p.b, &p.x0, &Config::default()).unwrap();
        let k = trace.residuals.len().min(case.rank.min(20));
        for i in 0..k {
            for j in 0..i {
                let (ri, rj) = (&trace.residuals[i], &trace.residuals[j]);
                let cos = ri.dot(rj).abs() / (ri.norm() * rj.norm());
                prop_assert!(cos <= 1e-8, "cos(r{}, r{}) = {:e}", i, j, cos);
            }
        }
    }

    #[test]
    fn cg_keeps_the_null_part_of_the_iterate(case in spsd_case()) {
        let p = case.problem(0.0);
        let d = eig(&p.a);
        let trace = cg_solve(&p.a, &p.b, &p.x0, &Config::default()).unwrap();
        prop_assert!(null_iterate_deviation(&trace, &d).unwrap() <= 1e-10);
        let p0 = trace.directions[0].norm();
        for dir in &trace.directions {
            let null = split(&d, dir).unwrap().null_part.norm();
            prop_assert!(null <= 1e-10 * p0, "‖Q₂ᵀp‖ = {:e}", null);
        }
    }

    #[test]
    fn consistent_runner_freezes_the_null_part(case in spsd_case()) {
        let p = case.problem(0.0);
        let d = eig(&p.a);
        let dt = decomposed_cg_run_consistent(&d, &p.b, &p.x0, case.rank, 1e-10).unwrap();
        for (p2, x2) in dt.p2.iter().zip(&dt.x2) {
            prop_assert!(p2.iter().all(|&v| v == 0.0));
            prop_assert_eq!(x2.as_slice(), dt.x2[0].as_slice());
        }
    }

    #[test]
    fn range_recurrence_is_cg_on_the_eigenvalues(case in spsd_case()) {
        let p = case.problem(0.0);
        let d = eig(&p.a);
        let dt = decomposed_cg_run_consistent(&d, &p.b, &p.x0, case.rank, 1e-10).unwrap();
        let lambda = Matrix::from_diag(d.range_lambdas());
        let cfg = Config::default().with_max_iters(case.rank).with_rel_tol(f64::MIN_POSITIVE);
        let reference = cg_solve(&lambda, &dt.b1, &dt.x1[0], &cfg).unwrap();
        let states = reference.iterates.len().min(dt.x1.len());
        prop_assert!(states >= 2);
        for i in 0..states {
            prop_assert_eq!(reference.iterates[i].as_slice(), dt.x1[i].as_slice());
            prop_assert_eq!(reference.residuals[i].as_slice(), dt.r1[i].as_slice());
            prop_assert_eq!(reference.directions[i].as_slice(), dt.p1[i].as_slice());
        }
        prop_assert_eq!(&reference.alphas[..states - 1], &dt.alphas[..states - 1]);
    }

    #[test]
    fn general_runner_keeps_the_null_residual(case in spsd_case(), gap in 0.1f64..2.0) {
        let p = case.problem(gap);
        let d = eig(&p.a);
        let dt = decomposed_cg_run(&d, &p.b, &p.x0, 20).unwrap();
        for r2 in &dt.r2 {
            prop_assert_eq!(r2.as_slice(), dt.b2.as_slice());
        }
        let conf = null_direction_confinement(&dt, 1e-8).unwrap();
        prop_assert!(conf.pass, "sine {:e}", conf.max_angle);
    }

    #[test]
    fn energy_norm_identities(case in spsd_case()) {
        let p = case.problem(0.0);
        let d = eig(&p.a);
        let pinv = pseudoinverse_matrix(&d);
        let trace = cg_solve(&p.a, &p.b, &p.x0, &Config::default()).unwrap();
        // the limit of the iteration; e then has no null part to cancel in eᵀAe
        let x0_null = semikrylov::SplitVector {
            range_part: Vec64::zeros(d.rank),
            null_part: split(&d, &p.x0).unwrap().null_part,
        }
        .reassemble(&d);
        let xstar = pseudoinverse_apply(&d, &p.b).unwrap().add(&x0_null);
        let m0 = range_energy_norm(&d, &trace.residuals[0]).unwrap();
        for (x, r) in trace.iterates.iter().zip(&trace.residuals) {
            let measured = range_energy_norm(&d, r).unwrap();
            if measured <= 1e-10 * m0 {
                break;
            }
            let direct = r.dot(&matvec(&pinv, r).unwrap()).sqrt();
            prop_assert!((measured - direct).abs() <= 1e-9 * measured, "{:e} vs {:e}", measured, direct);

            let e = x.sub(&xstar);
            let energy = e.dot(&matvec(&p.a, &e).unwrap());
            let e1 = split(&d, &e).unwrap().range_part;
            let diag: f64 = e1.iter().zip(d.range_lambdas()).map(|(c, l)| l * c * c).sum();
            prop_assert!((energy - diag).abs() <= 1e-9 * diag, "{:e} vs {:e}", energy, diag);
        }
    }

    #[test]
    fn cg_bound_holds(case in spsd_case()) {
        let p = case.problem(0.0);
        let d = eig(&p.a);
        let trace = cg_solve(&p.a, &p.b, &p.x0, &Config::default()).unwrap();
        let report = cg_bound_verify(&trace, &d).unwrap();
        prop_assert!(report.pass, "violations {:?}", report.violations);
    }

    #[test]
    fn cgls_reaches_the_min_norm_least_squares_solution(spec in rect_spec(), gap in 0.0f64..1.0) {
        let spec = if spec.rank() < spec.dims.0 { spec.with_gap(gap) } else { spec };
        let p: Problem<f64> = make_problem(&spec).unwrap();
        let s = svd(&p.a, DEFAULT_RANK_TOL).unwrap();
        let trace = cgls_solve(&p.a, &p.b, &Vec64::zeros(spec.dims.1), &Config::default()).unwrap();
        let atb = p.a.tr_matvec(&p.b).unwrap().norm();
        prop_assert!(*trace.normal_residual_norms.last().unwrap() <= 1e-8 * atb);
        let xstar = pinv_apply_rect(&s, &p.b).unwrap();
        prop_assert!(rel(&trace.solution, &xstar) <= 1e-8);
        let report = cgls_bound_verify(&trace, &s, &xstar).unwrap();
        prop_assert!(report.pass, "violations {:?}", report.violations);
    }

    #[test]
    fn cgne_reaches_the_min_norm_solution(spec in rect_spec()) {
        let p: Problem<f64> = make_problem(&spec).unwrap();
        let s = svd(&p.a, DEFAULT_RANK_TOL).unwrap();
        let trace = cgne_solve(&p.a, &p.b, &Vec64::zeros(spec.dims.0), &Config::default()).unwrap();
        let xstar = pinv_apply_rect(&s, &p.b).unwrap();
        prop_assert!(rel(&trace.solution, &xstar) <= 1e-8);
        prop_assert!(rel(&trace.solution, &p.xstar_reference) <= 1e-8);
        let report = cgne_bound_verify(&trace, &s).unwrap();
        prop_assert!(report.pass, "violations {:?}", report.violations);
    }
}
