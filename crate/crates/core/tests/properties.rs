use lmg_core::limit::{
    classify, critical_beta, metric_limit, paramagnetic_tensor, solve_r, Variant,
};
use lmg_core::metric::{bures_dense, default_fd_step, metric_fd_free_energy, metric_fluctuations};
use lmg_core::metric::bures::BURES_DEFAULT_STEP;
use lmg_core::numerics::{central_diff, logsumexp, DiffMode, DiffSpec};
use lmg_core::spectrum::{dense_hamiltonian, ground_state, sector_eigenvalues, spectrum};
use lmg_core::thermal::precise::{metric_per_spin, Component};
use lmg_core::thermal::{log_partition, moments};
use lmg_core::{ModelParams, Phase, ThermalEnsemble};
use nalgebra::{DMatrix, SymmetricEigen};

fn params(n: u32, beta: f64, h: f64) -> ModelParams {
    ModelParams::new(n, beta, h).unwrap()
}

#[test]
fn spectrum_multiset_is_even_in_h() {
    for n in [2, 6, 12] {
        for h in [0.1, 0.37, 1.9] {
            assert_eq!(sector_eigenvalues(n, h).unwrap(), sector_eigenvalues(n, -h).unwrap());
        }
    }
    for n in [50, 400] {
        let collect = |h: f64| {
            let mut v: Vec<(u32, f64)> =
                spectrum(n, h).unwrap().iter().flat_map(|s| s.levels.iter().map(move |l| (s.s, l.1))).collect();
            v.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            v
        };
        assert_eq!(collect(0.42), collect(-0.42));
    }
}

#[test]
fn ground_state_is_spectral_argmin() {
    for n in (2..=12).step_by(2) {
        for i in 0..=80 {
            let h = 2.0 * f64::from(i) / 80.0;
            let gs = ground_state(n, h).unwrap();
            let mut best = (f64::INFINITY, 0, 0);
            for sec in spectrum(n, h).unwrap() {
                for &(m, e) in &sec.levels {
                    if e < best.0 {
                        best = (e, sec.s, m);
                    }
                }
            }
            assert!((gs.energy - best.0).abs() < 1e-12, "N={n} h={h}");
            if !gs.degenerate {
                assert_eq!((gs.s0, gs.m0), (best.1, best.2), "N={n} h={h}");
            }
        }
    }
}

#[test]
fn weights_are_normalised() {
    for n in [2, 40, 300, 2000] {
        for beta in [0.05, 1.0, 4.0, 30.0] {
            for h in [0.0, 0.5, -1.7] {
                let ens = ThermalEnsemble::new(params(n, beta, h)).unwrap();
                let lw: Vec<f64> = ens.levels().map(|l| l.3).collect();
                let total = logsumexp(&lw).unwrap();
                assert!(total.abs() < 1e-12, "N={n} beta={beta} h={h}: {total}");
            }
        }
    }
}

#[test]
fn log_partition_derivatives_give_moments() {
    let spec = DiffSpec::new(1e-4, 1, DiffMode::First).unwrap();
    for n in [4, 20, 200] {
        for (beta, h) in [(0.6, 0.2), (1.5, 0.0), (2.5, 0.9)] {
            let m = moments(params(n, beta, h)).unwrap();
            let db = central_diff(|b| log_partition(params(n, b, h)).unwrap(), beta, &spec).unwrap().value;
            let dh = central_diff(|x| log_partition(params(n, beta, x)).unwrap(), h, &spec).unwrap().value;
            assert!((db + m.mean_h).abs() < 1e-6 * m.mean_h.abs().max(1.0), "N={n}: {db} vs {}", -m.mean_h);
            let want = 2.0 * beta * m.mean_sz;
            assert!((dh - want).abs() < 1e-6 * want.abs().max(1.0), "N={n}: {dh} vs {want}");
        }
    }
}

#[test]
fn free_energy_even_and_magnetisation_odd_exactly() {
    for n in [2, 30, 500] {
        for (beta, h) in [(0.3, 0.25), (2.0, 1.1), (7.0, 0.013)] {
            let a = ThermalEnsemble::new(params(n, beta, h)).unwrap();
            let b = ThermalEnsemble::new(params(n, beta, -h)).unwrap();
            assert_eq!(a.free_energy_per_spin(), b.free_energy_per_spin());
            assert_eq!(a.moments().mean_sz, -b.moments().mean_sz);
            assert_eq!(a.moments().cov_h_sz, -b.moments().cov_h_sz);
            assert_eq!(a.moments().var_h, b.moments().var_h);
        }
    }
}

#[test]
fn moments_match_dense_trace() {
    for n in [2, 4, 6, 8] {
        for (beta, h) in [(0.4, 0.0), (1.0, 0.35), (2.2, -0.8)] {
            let ham = dense_hamiltonian(n, h).unwrap();
            let dim = ham.nrows();
            let eig = SymmetricEigen::new(ham.clone());
            let lo = eig.eigenvalues.min();
            let w = eig.eigenvalues.map(|l| (-beta * (l - lo)).exp());
            let p = &w / w.sum();
            let rho = &eig.eigenvectors * DMatrix::from_diagonal(&p) * eig.eigenvectors.transpose();
            let sz = DMatrix::from_fn(dim, dim, |r, c| {
                if r == c {
                    f64::from((r as u32).count_ones()) - f64::from(n) / 2.0
                } else {
                    0.0
                }
            });
            let tr = |op: &DMatrix<f64>| (&rho * op).trace();
            let (eh, eh2) = (tr(&ham), tr(&(&ham * &ham)));
            let (es, es2) = (tr(&sz), tr(&(&sz * &sz)));
            let ehs = tr(&(&ham * &sz));
            let m = moments(params(n, beta, h)).unwrap();
            let pairs = [
                (m.mean_h, eh),
                (m.var_h, eh2 - eh * eh),
                (m.mean_sz, es),
                (m.var_sz, es2 - es * es),
                (m.cov_h_sz, ehs - eh * es),
            ];
            for (got, want) in pairs {
                assert!((got - want).abs() < 1e-10, "N={n} beta={beta} h={h}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn three_routes_agree() {
    for n in [2, 4, 6, 8] {
        for i in 0..5 {
            for j in 0..5 {
                let beta = 0.5 + 0.375 * f64::from(i);
                let h = 0.25 * f64::from(j);
                let p = params(n, beta, h);
                let fl = metric_fluctuations(p).unwrap();
                let fd = metric_fd_free_energy(p, default_fd_step(beta)).unwrap();
                let dense = bures_dense(n, beta, h, BURES_DEFAULT_STEP).unwrap().classical;
                assert!(fl.rel_diff(&fd, fl.scale()) < 1e-6, "N={n} beta={beta} h={h}");
                for (a, b) in fl.components().iter().zip(dense.components()) {
                    assert!((a - b).abs() < 1e-7, "N={n} beta={beta} h={h}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn metric_parity_and_positivity() {
    for n in [2, 16, 120, 1000] {
        for beta in [0.2, 1.0, 2.5, 8.0] {
            for h in [0.0, 0.15, 0.7, 1.6] {
                let g = metric_fluctuations(params(n, beta, h)).unwrap();
                let r = metric_fluctuations(params(n, beta, -h)).unwrap();
                let tol = 1e-12 * g.scale().max(1.0);
                assert!((g.g_bb - r.g_bb).abs() <= tol);
                assert!((g.g_hh - r.g_hh).abs() <= tol);
                assert!((g.g_bh + r.g_bh).abs() <= tol);
                assert!(g.det() >= -1e-10 * (g.g_bb * g.g_hh).max(1.0), "N={n} beta={beta} h={h}");
            }
        }
    }
}

#[test]
fn per_spin_g_hh_rises_toward_limit() {
    let mut prev = f64::NEG_INFINITY;
    for n in [50, 100, 200, 400, 800] {
        let dev = metric_per_spin(params(n, 2.0, 0.3)).unwrap().deviation(Component::Hh, 0.5);
        assert!(dev < 0.0, "N={n}: g_hh/N above the limit by {dev}");
        assert!(dev > prev, "N={n}");
        prev = dev;
    }
}

#[test]
fn per_spin_g_bh_vanishes_at_zero_field() {
    for n in [50, 100, 200, 400, 800] {
        assert_eq!(metric_per_spin(params(n, 2.0, 0.0)).unwrap().per_spin().g_bh, 0.0);
    }
}

#[test]
fn ordered_points_satisfy_self_consistency() {
    for i in 1..200 {
        let beta = 1.0 + 0.05 * f64::from(i);
        let r = solve_r(beta).unwrap().unwrap();
        assert!((r - (beta * r).tanh()).abs() < 1e-12, "beta={beta}");
        let p = classify(beta, 0.5 * r).unwrap();
        assert_eq!(p.phase, Phase::Ordered);
        assert_eq!(p.r, r);
    }
}

#[test]
fn boundary_is_consistent_across_fields() {
    for i in 1..40 {
        let h = f64::from(i) / 40.0;
        let bc = critical_beta(h).unwrap();
        assert_eq!(classify(bc - 1e-9, h).unwrap().phase, Phase::Paramagnetic, "h={h}");
        assert_eq!(classify(bc + 1e-9, h).unwrap().phase, Phase::Ordered, "h={h}");
        assert_eq!(classify(bc, h).unwrap().phase, Phase::Boundary, "h={h}");
    }
}

#[test]
fn order_parameter_is_continuous_at_boundary() {
    for h in [0.0, 0.2, 0.5, 0.8] {
        let bc = critical_beta(h).unwrap();
        let mus: Vec<f64> = (3..=9).map(|k| classify(bc + 10f64.powi(-k), h).unwrap().mu_xy).collect();
        assert!(mus.windows(2).all(|w| w[1] < w[0]), "h={h}: {mus:?}");
        assert!(mus[6] < 1e-3, "h={h}: {mus:?}");
    }
}

#[test]
fn paramagnetic_tensor_is_degenerate() {
    for (beta, h) in [(0.5, 0.3), (1.0, 2.0), (3.0, 1.2), (0.9, -0.1)] {
        let m = metric_limit(beta, h, Variant::Corrected).unwrap();
        assert!(m.degenerate);
        assert_eq!(m.det(), 0.0);
        assert_eq!(m.tensor, paramagnetic_tensor(beta, h));
    }
    let dets: Vec<f64> =
        [50, 100, 200, 400, 800].iter().map(|&n| metric_per_spin(params(n, 1.0, 2.0)).unwrap().det()).collect();
    assert!(dets.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0), "{dets:?}");
}

#[test]
fn low_temperature_asymptotics() {
    for h in [0.0, 0.3, 0.7] {
        let mut prev = f64::INFINITY;
        for t in [0.3, 0.2, 0.1, 0.05, 0.02, 0.01] {
            let m = metric_limit(1.0 / t, h, Variant::Corrected).unwrap();
            assert!(m.tensor.g_bb < prev && m.tensor.g_bb >= 0.0);
            prev = m.tensor.g_bb;
            assert!((t * m.tensor.g_hh - 0.25).abs() < 1e-12);
        }
    }
}
