//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rydpump::dynamics::SteadyBackend;
use rydpump::linalg::{partial_transpose, trace_distance};
use rydpump::measures::{negativity_forms, NEGATIVITY_CONSISTENCY_TOL};
use rydpump::{
    build_liouvillian, build_model, preset, steady_state, BipartiteDims, ComplexMatrix, Liouvillian, ModelParams,
    PresetId, SchemeVariant, StateVector, SteadyOptions, Target, C64,
};
use rydpump_cli::commands::{self, EvolveOutput};
use rydpump_cli::figures;
use rydpump_cli::spec::{Axis, Measure, RunSpec, Settings, SweepParam, SweepSpec};
use rydpump_cli::table::Table;

type Check = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Check);

const CHSH_TARGET: f64 = 2.821;
const CHSH_TOL: f64 = 0.01;
const FIDELITY_TARGET: f64 = 0.999;
const FIDELITY_TOL: f64 = 0.005;

fn settings(preset: &str) -> Settings {
    Settings { preset: Some(preset.into()), ..Default::default() }
}

fn steady_row(s: &Settings) -> Result<Table, String> {
    let spec = RunSpec::resolve(s).map_err(|e| e.to_string())?;
    commands::steady(&spec, false).map_err(|e| e.to_string())
}

fn value(t: &Table, col: &str) -> Result<f64, String> {
    t.column(col).and_then(|v| v.first().copied()).ok_or_else(|| format!("no {col} column"))
}

fn evolve(s: &Settings) -> Result<EvolveOutput, String> {
    let spec = RunSpec::resolve(s).map_err(|e| e.to_string())?;
    commands::evolve(&spec).map_err(|e| e.to_string())
}

fn bell_fidelity() -> Check {
    let mut s = settings("fig2");
    s.delta_mhz = Some(3.435);
    let t = steady_row(&s)?;
    let f = value(&t, "fidelity")?;
    Ok(((f - FIDELITY_TARGET).abs() <= FIDELITY_TOL, format!("F(S) = {f:.6}, want {FIDELITY_TARGET} ± {FIDELITY_TOL}")))
}

fn chsh_series() -> Check {
    let out = evolve(&settings("fig3"))?;
    let chsh = out.table.column("chsh").ok_or("no chsh column")?;
    let times = out.table.column("time_ms").ok_or("no time column")?;
    let inside = |x: f64| (x - CHSH_TARGET).abs() <= CHSH_TOL;
    let Some(entry) = chsh.iter().position(|x| inside(*x)) else {
        return Ok((false, format!("never enters the band; final {:.6}", chsh.last().unwrap())));
    };
    let stays = chsh[entry..].iter().all(|x| inside(*x));
    let last = *chsh.last().unwrap();
    Ok((
        stays && inside(last),
        format!(
            "enters {CHSH_TARGET} ± {CHSH_TOL} at {:.0} ms, {} afterwards, final {last:.6} at {:.0} ms",
            times[entry],
            if stays { "stays inside" } else { "leaves the band" },
            times.last().unwrap()
        ),
    ))
}

fn triplet_variant() -> Check {
    let mut s = settings("fig2");
    s.target = Some("triplet".into());
    let t = steady_row(&s)?;
    let (f, chsh) = (value(&t, "fidelity")?, value(&t, "chsh")?);
    Ok((
        (f - FIDELITY_TARGET).abs() <= FIDELITY_TOL && (chsh - CHSH_TARGET).abs() <= CHSH_TOL,
        format!("F(T) = {f:.6}, CHSH = {chsh:.6}"),
    ))
}

fn fidelity_trend() -> Check {
    let axis = Axis { param: SweepParam::UrrMhz, min: 1.0, max: 8.0, steps: 5 };
    let spec = SweepSpec::resolve(&settings("fig2"), vec![axis], Measure::Fidelity, 4).map_err(|e| e.to_string())?;
    let t = commands::sweep(&spec).map_err(|e| e.to_string())?;
    let f = t.column("fidelity").ok_or("no fidelity column")?;
    let increasing = f.windows(2).all(|w| w[1] > w[0]);
    let shown: Vec<String> = f.iter().map(|x| format!("{x:.5}")).collect();
    Ok((increasing, format!("F over U_rr/2π = 1..8 MHz: [{}]", shown.join(", "))))
}

fn qutrit_population() -> Check {
    let out = evolve(&settings("fig5-inset"))?;
    let times = out.table.column("time_ms").ok_or("no time column")?;
    let pop = out.table.column("pop_phi").ok_or("no pop_phi column")?;
    let i = times.iter().position(|t| (*t - 200.0).abs() < 1e-9).ok_or("no sample at 200 ms")?;
    Ok((pop[i] > 0.91, format!("P(phi) at 200 ms = {:.5}, want > 0.91", pop[i])))
}

fn negativity_peak() -> Check {
    let t = steady_row(&settings("fig6-point"))?;
    let n = value(&t, "negativity")?;
    Ok(((n - 0.9995).abs() <= 0.002, format!("N = {n:.6}, want 0.9995 ± 0.002")))
}

fn phi_prime_variant() -> Check {
    let mut s = settings("fig6-point");
    s.target = Some("phi-prime".into());
    let t = steady_row(&s)?;
    let (f, n) = (value(&t, "fidelity")?, value(&t, "negativity")?);
    Ok((f > 0.99 && n > 0.99, format!("F(phi') = {f:.6}, N = {n:.6}, want both > 0.99")))
}

fn ginibre(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_density(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n);
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn ket(da: usize, db: usize, m: usize, n: usize) -> StateVector {
    let mut v = StateVector::zeros(da * db);
    v[m * db + n] = C64::new(1.0, 0.0);
    v
}

fn outer(a: &StateVector, b: &StateVector) -> ComplexMatrix {
    a * b.adjoint()
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn microwave_only(target: Target) -> Result<ComplexMatrix, String> {
    let p = ModelParams {
        rabi_optical: re(0.0),
        rabi_microwave_1: re(0.37),
        rabi_microwave_2: re(0.37),
        detuning: 0.0,
        rydberg_u: 0.0,
        gamma: 1.0,
    };
    Ok(build_model(&p, SchemeVariant::of(target)).map_err(|e| e.to_string())?.hamiltonian)
}

fn dark_states() -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for target in [Target::Singlet, Target::Triplet, Target::Phi, Target::PhiPrime] {
        let h = microwave_only(target)?;
        let p = ModelParams {
            rabi_optical: re(0.0),
            rabi_microwave_1: re(0.0),
            rabi_microwave_2: re(0.0),
            detuning: 0.0,
            rydberg_u: 0.0,
            gamma: 1.0,
        };
        let model = build_model(&p, SchemeVariant::of(target)).map_err(|e| e.to_string())?;
        let image = &h * model.target_state();
        worst = worst.max(image.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(worst)
}

fn bell_expansion_defect(gamma: f64) -> Result<f64, String> {
    let p = ModelParams {
        rabi_optical: re(0.3),
        rabi_microwave_1: re(0.02),
        rabi_microwave_2: re(0.02),
        detuning: 2.0,
        rydberg_u: 4.0,
        gamma,
    };
    let model = build_model(&p, SchemeVariant::of(Target::Singlet)).map_err(|e| e.to_string())?;
    let k = |m, n| ket(3, 3, m, n);
    let (f, a, r) = (0, 1, 2);
    let t = (k(f, a) + k(a, f)) * re(FRAC_1_SQRT_2);
    let s = (k(f, a) - k(a, f)) * re(FRAC_1_SQRT_2);
    let tps = (&t + &s) * re(FRAC_1_SQRT_2);
    let tms = (&t - &s) * re(FRAC_1_SQRT_2);
    let amp = re((gamma / 2.0).sqrt());
    let expected = [
        (outer(&k(f, r), &k(r, r)) + outer(&tps, &k(r, a)) + outer(&k(f, f), &k(r, f))) * amp,
        (outer(&k(a, r), &k(r, r)) + outer(&tms, &k(r, f)) + outer(&k(a, a), &k(r, a))) * amp,
        (outer(&k(r, f), &k(r, r)) + outer(&tms, &k(a, r)) + outer(&k(f, f), &k(f, r))) * amp,
        (outer(&k(r, a), &k(r, r)) + outer(&tps, &k(f, r)) + outer(&k(a, a), &k(a, r))) * amp,
    ];
    Ok(model.lindblads.iter().zip(&expected).map(|(x, y)| max_abs(&(x - y))).fold(0.0, f64::max))
}

fn qutrit_expansion_defect(gamma: f64) -> Result<f64, String> {
    let p = ModelParams {
        rabi_optical: re(0.3),
        rabi_microwave_1: re(0.02),
        rabi_microwave_2: re(0.02),
        detuning: 2.0,
        rydberg_u: 4.0,
        gamma,
    };
    let model = build_model(&p, SchemeVariant::of(Target::Phi)).map_err(|e| e.to_string())?;
    let k = |m, n| ket(5, 4, m, n);
    let (f, a, g, r) = (0, 1, 2, 3);
    let phi = (k(f, f) + k(a, a) + k(g, g)) * re(1.0 / 3f64.sqrt());
    let varphi = (k(f, f) - k(a, a) * re(2.0) + k(g, g)) * re(1.0 / 6f64.sqrt());
    let psi = (k(f, f) - k(g, g)) * re(FRAC_1_SQRT_2);
    let third = re(1.0 / 3f64.sqrt());
    let sixth = re(1.0 / 6f64.sqrt());
    let ff = &phi * third + &varphi * sixth + &psi * re(FRAC_1_SQRT_2);
    let aa = &phi * third - &varphi * re(6f64.sqrt() / 3.0);
    let gg = &phi * third + &varphi * sixth - &psi * re(FRAC_1_SQRT_2);
    let pair = |x: usize| match x {
        0 => &ff,
        1 => &aa,
        _ => &gg,
    };
    let amp = re((gamma / 3.0).sqrt());
    let mut expected = Vec::new();
    for src in [3, 4] {
        for ground in [f, a, g] {
            let mut m = outer(&k(ground, r), &k(src, r)) + outer(pair(ground), &k(src, ground));
            for other in [f, a, g].into_iter().filter(|o| *o != ground) {
                m += outer(&k(ground, other), &k(src, other));
            }
            expected.push(m * amp);
        }
    }
    for ground in [f, a, g] {
        let mut m = outer(&k(3, ground), &k(3, r)) + outer(&k(4, ground), &k(4, r)) + outer(pair(ground), &k(ground, r));
        for other in [f, a, g].into_iter().filter(|o| *o != ground) {
            m += outer(&k(other, ground), &k(other, r));
        }
        expected.push(m * amp);
    }
    if model.lindblads.len() != expected.len() {
        return Err(format!("{} jump operators", model.lindblads.len()));
    }
    Ok(model.lindblads.iter().zip(&expected).map(|(x, y)| max_abs(&(x - y))).fold(0.0, f64::max))
}

fn negativity_consistency(rng: &mut StdRng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for dims in [BipartiteDims::new(2, 2), BipartiteDims::new(3, 3), BipartiteDims::new(5, 4)] {
        for _ in 0..100 {
            let rho = random_density(rng, dims.total());
            let (a, b) = negativity_forms(&rho, dims).map_err(|e| e.to_string())?;
            let pt = partial_transpose(&rho, dims).map_err(|e| e.to_string())?;
            let svd_form = (pt.singular_values().iter().sum::<f64>() - 1.0) / 2.0;
            worst = worst.max((a - b).abs()).max((svd_form - b).abs());
        }
    }
    Ok(worst)
}

fn backend_agreement() -> Result<f64, String> {
    let p = preset(PresetId::Fig2);
    let model = build_model(&p.lab.to_model_params(), p.variant).map_err(|e| e.to_string())?;
    let l = build_liouvillian(&model);
    let ns = steady_state(&l, &SteadyOptions::default()).map_err(|e| e.to_string())?;
    let lt = steady_state(&l, &SteadyOptions { backend: SteadyBackend::LongTime, ..Default::default() })
        .map_err(|e| e.to_string())?;
    trace_distance(&ns.rho, &lt.rho).map_err(|e| e.to_string())
}

fn liouvillian_oracle(rng: &mut StdRng) -> f64 {
    let n = 9;
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let g = ginibre(rng, n);
        let h = (&g + g.adjoint()) * re(0.5);
        let ls: Vec<ComplexMatrix> = (0..4).map(|_| ginibre(rng, n) * re(0.4)).collect();
        let l = Liouvillian::from_operators(&h, &ls).to_dense();
        for col in 0..n * n {
            let mut e = ComplexMatrix::zeros(n, n);
            e[(col % n, col / n)] = re(1.0);
            let mut rhs = (&e * &h - &h * &e) * C64::new(0.0, 1.0);
            for lk in &ls {
                let ldl = lk.adjoint() * lk;
                rhs += lk * &e * lk.adjoint() - (&ldl * &e + &e * &ldl) * re(0.5);
            }
            for row in 0..n * n {
                worst = worst.max((l[(row, col)] - rhs[(row % n, row / n)]).norm());
            }
        }
    }
    worst
}

fn property_suite() -> Check {
    let mut failures = Vec::new();
    let mut notes = Vec::new();

    let mut worst_trace: f64 = 0.0;
    let mut worst_eig: f64 = f64::INFINITY;
    for name in ["fig2-inset", "fig3", "fig5-inset"] {
        let out = evolve(&settings(name))?;
        worst_trace = worst_trace.max(out.max_trace_error);
        worst_eig = worst_eig.min(out.min_eigenvalue);
    }
    notes.push(format!("|tr-1| ≤ {worst_trace:.1e}, min eig {worst_eig:.1e}"));
    if worst_trace > 1e-6 || worst_eig < -1e-6 {
        failures.push("trajectory trace/positivity");
    }

    let dark = dark_states()?;
    notes.push(format!("dark {dark:.1e}"));
    if dark >= 1e-14 {
        failures.push("dark states");
    }

    let expansion = bell_expansion_defect(1.673)?.max(qutrit_expansion_defect(1.033)?);
    notes.push(format!("jump expansions {expansion:.1e}"));
    if expansion > 1e-12 {
        failures.push("jump operator expansions");
    }

    let mut rng = StdRng::seed_from_u64(20_240_601);
    let neg = negativity_consistency(&mut rng)?;
    notes.push(format!("negativity forms {neg:.1e}"));
    if neg > NEGATIVITY_CONSISTENCY_TOL {
        failures.push("negativity forms");
    }

    let backends = backend_agreement()?;
    notes.push(format!("backends {backends:.1e}"));
    if backends > 1e-5 {
        failures.push("steady-state backends");
    }

    let oracle = liouvillian_oracle(&mut rng);
    notes.push(format!("generator vs oracle {oracle:.1e}"));
    if oracle > 1e-12 {
        failures.push("generator oracle");
    }

    let mut detail = notes.join("; ");
    if !failures.is_empty() {
        detail = format!("{detail}; failed: {}", failures.join(", "));
    }
    Ok((failures.is_empty(), detail))
}

fn robustness_grids() -> Check {
    let workers = std::thread::available_parallelism().map_or(2, |n| n.get());
    let grid = |fig: &str| figures::reproduce(fig, 5, workers).map_err(|e| e.to_string());
    let mut parts = Vec::new();
    let mut ok = true;
    for (fid_fig, chsh_fig) in [("fig8a", "fig8c"), ("fig8b", "fig8d")] {
        let f = grid(fid_fig)?.column("fidelity").ok_or("no fidelity column")?;
        let c = grid(chsh_fig)?.column("chsh").ok_or("no chsh column")?;
        let f_good = f.iter().filter(|x| **x > 0.9).count();
        let c_good = c.iter().filter(|x| **x > 2.2).count();
        let both = f.iter().zip(&c).filter(|(x, y)| **x > 0.9 && **y > 2.2).count();
        let frac = both as f64 / f.len() as f64;
        ok &= frac >= 0.6;
        parts.push(format!(
            "{fid_fig}/{chsh_fig}: F>0.9 on {f_good}/25, CHSH>2.2 on {c_good}/25, both on {both}/25"
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("bell steady-state fidelity", bell_fidelity),
        ("CHSH time series converges", chsh_series),
        ("triplet variant", triplet_variant),
        ("fidelity grows with U_rr", fidelity_trend),
        ("qutrit population at 200 ms", qutrit_population),
        ("negativity at the quoted optimum", negativity_peak),
        ("phi-prime variant", phi_prime_variant),
        ("property suite", property_suite),
        ("robustness grids", robustness_grids),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        println!("{} {}. {name}: {detail} [{secs:.1} s]", if pass { "PASS" } else { "FAIL" }, i + 1);
        if !pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
    } else {
        println!("acceptance: {} of {} criteria fail: {:?}", failed.len(), criteria.len(), failed);
        std::process::exit(1);
    }
}
