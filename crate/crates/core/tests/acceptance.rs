//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use joint_schur::bounds::{assemble_t_tilde, GroundTruthModel};
use joint_schur::io;
use joint_schur::harness::{
    distance_to_nearest, enumerate_exact_triangularizers, gen_components, gen_ground_truth, noise_tensor,
    noiseless_sigma_max, run_trial, sigma_sweep, trial_noise, verify_bounds, verify_components, ContainmentCounts,
    GeneratorSpec, NoiseStyle, ABS_FLOOR, SLACK,
};
use joint_schur::linalg::{Matrix, OrthogonalFrame, SkewDirection};
use joint_schur::random;
use joint_schur::tensor::{
    decompose, first_order_model, match_columns, observable_matrices, Tensor3,
};
use joint_schur::triangularizer::{
    descend, find_separating_beta, gradient, hessian_form, loss, schur_initializer, BetaStrategy, CombinationVector,
    OptimizerConfig,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn config() -> OptimizerConfig<f64> {
    OptimizerConfig { max_iters: 2000, ..Default::default() }
}

fn model(d: usize, n: usize, kappa: f64, seed: u64) -> GroundTruthModel<f64> {
    gen_ground_truth(&GeneratorSpec::new(d, n, kappa, 1.0, seed)).expect("generator")
}

/// κ targets spread over `[1.5, hi]`.
fn kappa_for(i: usize, count: usize, hi: f64) -> f64 {
    1.5 + (hi - 1.5) * i as f64 / (count.max(2) - 1) as f64
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn noiseless_exactness() -> Outcome {
    let (mut worst_loss, mut worst_dist) = (0.0f64, 0.0f64);
    for i in 0..20 {
        let gt = model(4, 4, kappa_for(i, 20, 3.0), 1000 + i as u64);
        if gt.kappa() > 3.0 + 1e-9 {
            return Err(format!("model {i} has kappa {}", gt.kappa()));
        }
        let set = gt.clean_set();
        let beta = find_separating_beta(&set, BetaStrategy::Ones, i as u64, 100).map_err(|e| e.to_string())?.beta;
        let u0 = schur_initializer(&set, &beta).map_err(|e| e.to_string())?;
        let (u, _) = descend(&set, &u0, &config()).map_err(|e| e.to_string())?;
        let family = enumerate_exact_triangularizers(&gt).map_err(|e| e.to_string())?;
        let (dist, _) = distance_to_nearest(&u, &family).map_err(|e| e.to_string())?;
        worst_loss = worst_loss.max(loss(&u, &set).unwrap());
        worst_dist = worst_dist.max(dist);
    }
    check(
        worst_loss <= 1e-20 && worst_dist <= 1e-8,
        format!("20 models, max loss {worst_loss:.2e}, max distance {worst_dist:.2e}"),
    )
}

fn census() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (d, want) in [(2usize, 8usize), (3, 48)] {
        let gt = model(d, d, 2.0, 7 + d as u64);
        let family = enumerate_exact_triangularizers(&gt).map_err(|e| e.to_string())?;
        let set = gt.clean_set();
        let max_loss = family.frames.iter().map(|u| loss(u, &set).unwrap()).fold(0.0, f64::max);
        let mut min_sep = f64::INFINITY;
        for a in 0..family.len() {
            for b in (a + 1)..family.len() {
                min_sep = min_sep.min((family.frames[a].matrix() - family.frames[b].matrix()).frobenius_norm());
            }
        }
        ok &= family.len() == want && max_loss <= 1e-18 && min_sep > 1e-6;
        parts.push(format!("d={d}: {} frames, max loss {max_loss:.1e}, min separation {min_sep:.2}", family.len()));
    }
    check(ok, parts.join("; "))
}

fn random_frame(rng: &mut random::Stream, d: usize) -> OrthogonalFrame<f64> {
    let x = Matrix::from_col_major(d, d, random::normal_vec(rng, d * d)).unwrap();
    OrthogonalFrame::identity(d).retract(&SkewDirection::skew_part(&x), 1.0)
}

fn derivative_conformance() -> Outcome {
    let (mut g_err, mut h_err) = (0.0f64, 0.0f64);
    for m in 0..5u64 {
        let gt = model(4, 4, 2.5, 2000 + m).with_sigma(0.1).unwrap();
        let set = gt.observed_set();
        let mut rng = random::stream(m, 99);
        for _ in 0..20 {
            let u = random_frame(&mut rng, 4);
            let x = Matrix::from_col_major(4, 4, random::normal_vec(&mut rng, 16)).unwrap();
            let x = SkewDirection::skew_part(&x).normalized();
            let f = |t: f64| loss(&u.retract(&x, t), &set).unwrap();
            let exact_g = gradient(&u, &set).unwrap().matrix().dot(x.matrix());
            let h = 1e-5;
            let fd_g = (f(h) - f(-h)) / (2.0 * h);
            g_err = g_err.max((fd_g - exact_g).abs() / exact_g.abs().max(1e-8));
            let exact_h = hessian_form(&u, &set, &x).unwrap();
            let h = 1e-4;
            let fd_h = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
            h_err = h_err.max((fd_h - exact_h).abs() / exact_h.abs().max(1e-8));
        }
    }
    check(
        g_err <= 1e-6 && h_err <= 1e-5,
        format!("100 (U, X) pairs, gradient rel err {g_err:.1e}, Hessian rel err {h_err:.1e}"),
    )
}

fn lemma4_spectrum() -> Outcome {
    let mut violations = 0;
    let mut tight = 0;
    let mut min_ratio = f64::INFINITY;
    for i in 0..100u64 {
        let d = 2 + (i % 4) as usize;
        let n = 1 + (i % 6) as usize;
        let gt = model(d, n, 1.0 + (i % 5) as f64 * 0.5, 3000 + i);
        let u = gt.triangularizer_for(&(0..d).collect::<Vec<_>>());
        let ops = assemble_t_tilde(&u, &gt.clean_set(), None).map_err(|e| e.to_string())?;
        let lower = gt.gamma() / gt.kappa().powi(4);
        min_ratio = min_ratio.min(ops.sigma_min / lower);
        // equality is attained for d = 2 with orthogonal V; allow roundoff
        violations += (ops.sigma_min < lower * (1.0 - 1e-12)) as usize;
        tight += (ops.sigma_min < lower * (1.0 + 1e-9)) as usize;
    }
    check(
        violations == 0,
        format!("100 models, {violations} violations, {tight} attain equality, min sigma_min/(gamma/kappa^4) = {min_ratio:.6}"),
    )
}

fn scaling() -> Outcome {
    let grid = [1e-3, 5e-4, 2.5e-4, 1.25e-4];
    let mut parts = Vec::new();
    let mut ok = true;
    for i in 0..5u64 {
        let gt = model(3, 3, kappa_for(i as usize, 5, 2.0), 4000 + i);
        let rep = sigma_sweep(&gt, &grid, 2, i, &config()).map_err(|e| e.to_string())?;
        let (a, r) = (rep.alpha_slope.unwrap_or(f64::NAN), rep.residual_slope.unwrap_or(f64::NAN));
        ok &= r >= 1.7 && (a - 1.0).abs() <= 0.2;
        parts.push(format!("({a:.3}, {r:.3})"));
    }
    check(ok, format!("5 models, (alpha slope, residual slope): {}", parts.join(" ")))
}

fn containment() -> Outcome {
    let mut counts = ContainmentCounts::default();
    for i in 0..20u64 {
        let gt = model(4, 4, kappa_for(i as usize, 20, 3.0), 5000 + i);
        let rep = verify_bounds(&gt, 1e-3, 5, i, &config()).map_err(|e| e.to_string())?;
        counts.merge(&rep.counts);
    }
    let mut components = 0;
    let mut comp_trials = 0;
    for i in 0..20u64 {
        let z = gen_components(4, 4, kappa_for(i as usize, 20, 3.0), 6000 + i).map_err(|e| e.to_string())?;
        let study = verify_components(&z, 1e-3, 1.0, 5, i, &config()).map_err(|e| e.to_string())?;
        components += study.passed;
        comp_trials += study.records.len();
    }
    let need = |c: usize, t: usize| c * 100 >= 95 * t;
    let ok = need(counts.apriori, counts.trials)
        && need(counts.explicit, counts.trials)
        && need(counts.aposteriori, counts.trials)
        && need(counts.eigenvalue, counts.trials)
        && need(components, comp_trials)
        && counts.apriori_le_explicit == counts.trials;
    check(
        ok,
        format!(
            "of {} trials: apriori {}, explicit {}, aposteriori {}, eigenvalue {}, apriori<=explicit {}, errors {}; \
             components {components}/{comp_trials}",
            counts.trials,
            counts.apriori,
            counts.explicit,
            counts.aposteriori,
            counts.eigenvalue,
            counts.apriori_le_explicit,
            counts.errors
        ),
    )
}

fn certification() -> Outcome {
    let mut inside = 0;
    let mut total = 0;
    for i in 0..20u64 {
        let gt = model(4, 4, kappa_for(i as usize, 20, 3.0), 7000 + i);
        let smax = noiseless_sigma_max(&gt, i).map_err(|e| e.to_string())?;
        let family = enumerate_exact_triangularizers(&gt).map_err(|e| e.to_string())?;
        let noisy = gt
            .with_noise(trial_noise(4, 4, NoiseStyle::Dense, i, 0))
            .and_then(|g| g.with_sigma(0.5 * smax))
            .map_err(|e| e.to_string())?;
        total += 1;
        if let Ok(o) = run_trial(&noisy, &family, 0, i, &config()) {
            inside += (o.observed_alpha <= SLACK * o.alpha_apriori + ABS_FLOOR) as usize;
        }
    }
    check(inside * 100 >= 95 * total, format!("{inside}/{total} runs within the a priori bound"))
}

fn tensor_pipeline() -> Outcome {
    let theta = CombinationVector::ones(4);
    let mut worst: f64 = 0.0;
    for i in 0..5u64 {
        let z = gen_components(4, 4, 2.0, 8000 + i).map_err(|e| e.to_string())?;
        let t = Tensor3::symmetric_cp(&z);
        let dec = decompose(&t, 4, &theta, BetaStrategy::Ones, i, &config()).map_err(|e| e.to_string())?;
        let m = match_columns(dec.components.matrix(), z.matrix()).map_err(|e| e.to_string())?;
        worst = worst.max(m.max_error);
    }

    let z = gen_components(4, 4, 2.0, 8100).map_err(|e| e.to_string())?;
    let e = noise_tensor(4, 1.0, 8100, 1);
    let fo = first_order_model(&z, &e).map_err(|e| e.to_string())?;
    let ground = Tensor3::symmetric_cp(&z);
    let mut residuals = Vec::new();
    let mut partition: f64 = 0.0;
    for s in [1e-3, 1e-4, 1e-5] {
        let obs = observable_matrices(&ground.add_scaled(&e, s).unwrap(), 4, &theta).map_err(|e| e.to_string())?;
        let r = obs
            .set
            .iter()
            .zip(fo.m.iter().zip(&fo.w))
            .map(|(mh, (m, w))| (&(mh - m).scale(1.0 / s) - w).frobenius_norm())
            .fold(0.0, f64::max);
        residuals.push(r);
        let sum = obs.set.combine(&obs.weights).unwrap();
        partition = partition.max((&sum - &Matrix::identity(4)).max_abs());
    }
    let linear = residuals.windows(2).all(|w| (5.0..20.0).contains(&(w[0] / w[1])));

    check(
        worst <= 1e-8 && linear && partition <= 1e-10,
        format!(
            "recovery error {worst:.1e}; noise-term residuals {:.1e} {:.1e} {:.1e}; partition of unity {partition:.1e}",
            residuals[0], residuals[1], residuals[2]
        ),
    )
}

/// Runs every subcommand twice with identical flags and compares output
/// bytes, then checks that each file format reloads bit-exactly.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).display().to_string();
    let (model, tensor, frame) = (path("model.json"), path("tensor.json"), path("frame.json"));
    let commands: Vec<Vec<String>> = vec![
        vec!["generate", "--kind", "model", "--d", "3", "--N", "3", "--kappa", "2", "--gamma", "1", "--sigma", "1e-3", "--seed", "7"],
        vec!["generate", "--kind", "tensor", "--d", "3", "--N", "3", "--sigma", "1e-4", "--seed", "7"],
        vec!["triangularize", "--input", &model, "--sigma", "1e-3", "--tol", "1e-12", "--max-iters", "500"],
        vec!["bounds", "--input", &model],
        vec!["tensor", "--input", &tensor, "--d", "3", "--theta", "random", "--seed", "3"],
        vec!["sweep", "--input", &model, "--sigma", "1e-3", "--trials", "2", "--seed", "1"],
        vec!["verify", "--d", "3", "--N", "4", "--sigma", "1e-3", "--trials", "8", "--seed", "5"],
    ]
    .into_iter()
    .map(|c| c.into_iter().map(String::from).collect())
    .collect();
    let fixed_outputs = [Some(&model), Some(&tensor), Some(&frame)];
    for (k, cmd) in commands.iter().enumerate() {
        let mut bytes = Vec::new();
        for rep in 0..2 {
            let out = match fixed_outputs.get(k).copied().flatten() {
                Some(p) if rep == 0 => p.clone(),
                _ => path(&format!("out_{k}_{rep}.json")),
            };
            let argv = std::iter::once("jschur".to_string())
                .chain(cmd.iter().cloned())
                .chain(["--output".to_string(), out.clone()]);
            let code = joint_schur::cli::run(argv);
            if code != 0 {
                return Err(format!("`{}` exited with {code}", cmd.join(" ")));
            }
            bytes.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        if bytes[0] != bytes[1] {
            return Err(format!("`{}` is not byte-reproducible", cmd[0]));
        }
    }

    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    let gt = io::load_ground_truth(Path::new(&model)).map_err(|e| e.to_string())?;
    let t = io::load_tensor(Path::new(&tensor)).map_err(|e| e.to_string())?;
    let u = io::load_frame(Path::new(&frame)).map_err(|e| e.to_string())?;
    let set = io::load_matrix_set(Path::new(&model)).map_err(|e| e.to_string())?;
    let copy = path("copy.json");
    let mut exact = true;
    io::save_ground_truth(Path::new(&copy), &gt).map_err(|e| e.to_string())?;
    let gt2 = io::load_ground_truth(Path::new(&copy)).map_err(|e| e.to_string())?;
    exact &= bits(gt.v().as_slice()) == bits(gt2.v().as_slice())
        && bits(gt.lambda().as_slice()) == bits(gt2.lambda().as_slice())
        && gt.noise().iter().zip(gt2.noise()).all(|(a, b)| bits(a.as_slice()) == bits(b.as_slice()))
        && gt.sigma().to_bits() == gt2.sigma().to_bits();
    io::save_tensor(Path::new(&copy), &t).map_err(|e| e.to_string())?;
    exact &= bits(io::load_tensor(Path::new(&copy)).unwrap().data()) == bits(t.data());
    io::save_frame(Path::new(&copy), &u).map_err(|e| e.to_string())?;
    exact &= bits(io::load_frame(Path::new(&copy)).unwrap().matrix().as_slice()) == bits(u.matrix().as_slice());
    io::save_matrix_set(Path::new(&copy), &set).map_err(|e| e.to_string())?;
    let set2 = io::load_matrix_set(Path::new(&copy)).unwrap();
    exact &= set.iter().zip(set2.iter()).all(|(a, b)| bits(a.as_slice()) == bits(b.as_slice()));
    check(exact, format!("{} commands byte-reproducible; 4 file formats round-trip bit-exact", commands.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("noiseless exactness", noiseless_exactness),
        ("triangularizer census", census),
        ("derivative conformance", derivative_conformance),
        ("commutator operator spectrum", lemma4_spectrum),
        ("first-order scaling", scaling),
        ("bound containment", containment),
        ("certified initialization", certification),
        ("tensor pipeline", tensor_pipeline),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.1}s] {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.1}s] {detail}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
