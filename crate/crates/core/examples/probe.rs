use unisparse::analysis::{self, SpectralReport};
use unisparse::generative::{synthesize, SamplerConfig};
use unisparse::learner::{make_initializer, run, InitKind, LearnerConfig};

fn main() {
    let t0 = std::time::Instant::now();
    // fig1 setting: n=50, N=10000, s=5, eps init, 50 iterations, no normalize
    let cfg = SamplerConfig { n: 50, n_cols: 10000, s: 5, seed: 0, normalize: false };
    let model = synthesize(&cfg).unwrap();
    let report = SpectralReport::compute(model.z_star()).unwrap();
    println!("[fig1 s=5] q1={:.6} q2={:.6} kappa={:.6} eps={:.3e} beta_min={:.3e}", report.q1, report.q2, report.kappa, report.epsilon, report.beta_min);
    let w0 = make_initializer(InitKind::Eps, 50, Some(&model), 1).unwrap();
    let lcfg = LearnerConfig::new(5, 50).trace_against(&model);
    let trace = run(model.p(), &w0, &lcfg).unwrap();
    println!("initial err_w = {:.6e}", trace.initial_err_w.unwrap());
    let mut prev = trace.initial_err_w.unwrap();
    for r in &trace.records {
        let ew = r.err_w.unwrap();
        let ez = r.err_z.unwrap();
        println!("t={:2} obj={:.3e} err_w={:.6e} err_z={:.6e} ratio_w={:.4}", r.t, r.objective, ew, ez, ew / prev);
        prev = ew;
        if r.t > 30 { break; }
    }
    println!("synth+run took {:?}", t0.elapsed());

    // normalized variant for comparison
    let cfg_n = SamplerConfig { normalize: true, ..cfg };
    let model_n = synthesize(&cfg_n).unwrap();
    let report_n = SpectralReport::compute(model_n.z_star()).unwrap();
    println!("[fig1 s=5 normalized] q1={:.6} q2={:.6} kappa={:.6}", report_n.q1, report_n.q2, report_n.kappa);

    // fig2: all six inits, s=5 and s=10, iterations to objective <= 1e-8
    for s in [5usize, 10] {
        let cfg2 = SamplerConfig { n: 50, n_cols: 10000, s, seed: 0, normalize: false };
        let m2 = synthesize(&cfg2).unwrap();
        for kind in InitKind::ALL {
            let t1 = std::time::Instant::now();
            let w0 = make_initializer(kind, 50, Some(&m2), 7).unwrap();
            let lcfg2 = LearnerConfig::new(s, 1000).trace_against(&m2);
            let tr = run(m2.p(), &w0, &lcfg2).unwrap();
            let reach = tr.iterations_to_objective(1e-8);
            println!(
                "[fig2 s={}] init={:5} reach(1e-8)={:?} monotone={} final_obj={:.3e} elapsed={:?}",
                s, kind.name(), reach, tr.objective_is_monotone(1e-12),
                tr.records.last().unwrap().objective, t1.elapsed()
            );
        }
    }

    // conjecture
    let t2 = std::time::Instant::now();
    let res = analysis::monte_carlo_conjecture(50, 5, &[1000, 10000], 20, 0).unwrap();
    for r in &res {
        println!(
            "[conjecture] N={} median={:.4} max={:.4} frac_below_1={:.2}",
            r.n_cols, r.median_q(), r.max_q(), r.fraction_below_one
        );
    }
    println!("conjecture took {:?}", t2.elapsed());
}
