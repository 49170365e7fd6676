//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use leakshare::bounds::{bound_bitwise, delta_from_eps, mis_to_ds_ss};
use leakshare::channels::{bsc, bsc_eps, per_bit_channel, q_from_eps, Channel};
use leakshare::infotheory::{
    binary_entropy, binary_entropy_inv, mgl_lower_bound, star, star_iter, DiscreteDistribution, JointDistribution,
};
use leakshare::oracle::{markov_gap, markov_gap_for, sample_dirichlet, Oracle};
use leakshare::bitexpand::n_tilde_of;
use leakshare::{FieldElement, FieldSpec, LinearScheme, ShamirParams};

const TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn gf(l: u32) -> FieldSpec {
    FieldSpec::with_default_poly(l).unwrap()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

fn q_grid() -> Vec<f64> {
    (1..=9).map(|i| 0.05 * i as f64).collect()
}

fn c1_round_trip() -> Outcome {
    let f = gf(3);
    let p = ShamirParams::with_default_points(f, 4, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let subs = subsets(4, 3);
    let mut checks = 0usize;
    for s in f.elements() {
        for _ in 0..1000 {
            let coeffs: Vec<FieldElement> = (0..2).map(|_| FieldElement::new(rng.random_range(0..8))).collect();
            let shares = p.share(s, &coeffs).unwrap();
            for sub in &subs {
                let pairs: Vec<_> = sub.iter().map(|&i| (p.gammas()[i], shares.0[i])).collect();
                if p.reconstruct(&pairs).unwrap() != s {
                    return outcome(false, format!("secret {} subset {sub:?} failed", s.value()));
                }
                checks += 1;
            }
        }
    }
    outcome(true, format!("{checks} reconstructions exact"))
}

fn c2_perfect_secrecy() -> Outcome {
    let f = gf(3);
    let p = ShamirParams::with_default_points(f, 4, 3).unwrap();
    let oracle = Oracle::default();
    let mut dists = vec![DiscreteDistribution::uniform(8)];
    dists.extend(sample_dirichlet(8, 50, 2));
    let mut worst = 0.0f64;
    for sub in subsets(4, 2) {
        let chans: Vec<Channel> =
            (0..4).map(|i| if sub.contains(&i) { Channel::identity(8) } else { Channel::silent(8) }).collect();
        let k = oracle.kernel(&p, &chans).unwrap();
        for d in &dists {
            worst = worst.max(k.mutual_information(d).unwrap());
        }
    }
    outcome(worst <= TOL, format!("max I(S; 2 shares) = {worst:.3e} over 6 subsets x 51 distributions"))
}

fn c3_closed_form() -> Outcome {
    let oracle = Oracle::default();
    let mut worst = 0.0f64;
    let mut spot = f64::NAN;
    for n in 1..=6 {
        let s = LinearScheme::all_ones(n, gf(1)).unwrap();
        for q in q_grid() {
            let exact = oracle.exact_mi(&s, &vec![bsc(q).unwrap(); n], &DiscreteDistribution::uniform(2)).unwrap();
            let closed = 1.0 - binary_entropy((1.0 - (1.0 - 2.0 * q).powi(n as i32)) / 2.0).unwrap();
            worst = worst.max((exact.total_mi - closed).abs());
            if n == 2 && (q - 0.1).abs() < 1e-12 {
                spot = exact.total_mi;
            }
        }
    }
    let spot_ok = (spot - 0.319923).abs() <= 1e-5;
    outcome(worst <= TOL && spot_ok, format!("max |exact - closed form| = {worst:.3e}; N=2 q=0.1 -> {spot:.6}"))
}

fn c4_bsc_soundness() -> Outcome {
    let oracle = Oracle::default();
    let mut worst = f64::INFINITY;
    let mut formula_gap = 0.0f64;
    let mut spot = (f64::NAN, f64::NAN);
    let mut points = 0;
    for n in 1..=6 {
        let s = LinearScheme::all_ones(n, gf(1)).unwrap();
        for q in q_grid() {
            let k = oracle.kernel(&s, &vec![bsc(q).unwrap(); n]).unwrap();
            let bound = (1.0 - 2.0 * q).powi(2 * n as i32);
            formula_gap = formula_gap.max((bound_bitwise(n, 0, bsc_eps(q).unwrap()).unwrap() - bound).abs());
            let mut dists = vec![DiscreteDistribution::uniform(2)];
            dists.extend(sample_dirichlet(2, 100, 1000 + points));
            for d in &dists {
                let v = k.bit_mutual_information(d, 0).unwrap();
                worst = worst.min(bound - v);
                if n == 2 && (q - 0.1).abs() < 1e-12 && d == &dists[0] {
                    spot = (v, bound);
                }
            }
            points += 1;
        }
    }
    let spot_ok = spot.0 <= spot.1 && (spot.1 - 0.4096).abs() < 1e-12;
    outcome(
        worst >= -TOL && spot_ok && formula_gap <= TOL,
        format!(
            "min margin = {worst:.3e} over {points} points x 101 distributions; spot {:.6} <= {:.4}; bound formula gap {formula_gap:.1e}",
            spot.0, spot.1
        ),
    )
}

fn c5_uniform_soundness() -> Outcome {
    let oracle = Oracle::default();
    let mut worst = f64::INFINITY;
    let mut cases = 0;
    for l in [2u32, 3] {
        for n in [2usize, 3] {
            let f = gf(l);
            let p = ShamirParams::with_default_points(f, n, n).unwrap();
            let nt = n_tilde_of(&LinearScheme::shamir(p.clone()).unwrap());
            for q in [0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.45] {
                let ch = per_bit_channel(&bsc(q).unwrap(), l).unwrap();
                let r = oracle.exact_mi(&p, &vec![ch; n], &DiscreteDistribution::uniform(f.order())).unwrap();
                let bound = bound_bitwise(nt, 0, bsc_eps(q).unwrap()).unwrap();
                worst = worst.min(bound - r.max_per_bit());
                cases += 1;
            }
        }
    }
    outcome(worst >= -TOL, format!("min margin = {worst:.3e} over {cases} configurations"))
}

fn c6_sum_soundness() -> Outcome {
    let oracle = Oracle::default();
    let f = gf(2);
    let p = ShamirParams::with_default_points(f, 3, 2).unwrap();
    let mut dists = vec![DiscreteDistribution::uniform(4)];
    dists.extend(sample_dirichlet(4, 49, 6));
    let mut worst = f64::INFINITY;
    let mut cases = 0;
    for qs in [[0.2, 0.25, 0.3], [0.1, 0.3, 0.45], [0.35, 0.25, 0.15]] {
        let chans: Vec<Channel> = qs.iter().map(|&q| per_bit_channel(&bsc(q).unwrap(), 2).unwrap()).collect();
        for tp in [0usize, 1] {
            let colluders: Vec<usize> = (0..tp).collect();
            let bound: f64 = qs[tp..].iter().map(|&q| bsc_eps(q).unwrap()).sum();
            for d in &dists {
                let v = oracle.exact_conditional_mi_given_colluders(&p, &colluders, &chans, d).unwrap() / 2.0;
                worst = worst.min(bound - v);
                cases += 1;
            }
        }
    }
    outcome(worst >= -TOL, format!("min margin = {worst:.3e} over {cases} cases"))
}

fn c7_collusion_equivalence() -> Outcome {
    let oracle = Oracle::default();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for l in [2u32, 3] {
        let f = gf(l);
        for t in [2usize, 3] {
            let p = ShamirParams::with_default_points(f, 3, t).unwrap();
            let chans: Vec<Channel> =
                [0.1, 0.2, 0.3].iter().map(|&q| per_bit_channel(&bsc(q).unwrap(), l).unwrap()).collect();
            let mut dists = vec![DiscreteDistribution::uniform(f.order())];
            dists.extend(sample_dirichlet(f.order(), 3, 70 + t as u64));
            for c in 0..3 {
                for d in &dists {
                    let direct = oracle.exact_conditional_mi_given_colluders(&p, &[c], &chans, d).unwrap();
                    let reduced = oracle.reduced_conditional_mi(&p, &[c], &chans, d).unwrap();
                    worst = worst.max((direct - reduced).abs());
                    cases += 1;
                }
            }
        }
    }
    outcome(worst <= TOL, format!("max |direct - reduced| = {worst:.3e} over {cases} cases"))
}

fn c8_markov() -> Outcome {
    let qs: Vec<f64> = (0..10).map(|i| 0.5 * i as f64 / 9.0).collect();
    let alphas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let mut worst = 0.0f64;
    let mut points = 0;
    for k in 2..=6 {
        for &q in &qs {
            for &a in &alphas {
                let g = markov_gap(k, q, a).unwrap();
                worst = worst.max(g.gap_mi).max(g.gap_markov);
                points += 1;
            }
        }
    }
    // Negative control as stated: X0 = X1 uniform, k = 2.
    let literal = markov_gap_for(&[0.5, 0.0, 0.0, 0.5], 2, 0.1).unwrap();
    // The same correlation with a third independent bit, so S(X) is not constant.
    let mut p3 = vec![0.0; 8];
    for x0 in 0..2 {
        for x2 in 0..2 {
            p3[x0 | x0 << 1 | x2 << 2] = 0.25;
        }
    }
    let variant = markov_gap_for(&p3, 3, 0.1).unwrap();
    let pass = worst <= TOL && literal.gap_mi > 1e-3;
    outcome(
        pass,
        format!(
            "max gap = {worst:.3e} over {points} grid points; control X0=X1 k=2: gap_mi = {:.3e} (S(X) is constant, so no gap is possible); control with independent X2, k=3: gap_mi = {:.3e}",
            literal.gap_mi, variant.gap_mi
        ),
    )
}

fn c9_mgl() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::INFINITY;
    let trials = 2000;
    let random_side = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        let outs = rng.random_range(1..=4);
        (0..2)
            .map(|_| {
                let w: Vec<f64> = (0..outs).map(|_| rng.random::<f64>() + 1e-3).collect();
                let s: f64 = w.iter().sum();
                w.iter().map(|x| x / s).collect()
            })
            .collect()
    };
    for _ in 0..trials {
        let pa: [f64; 2] = if rng.random_bool(0.3) { [0.5, 0.5] } else { [rng.random(), rng.random()] };
        let w0 = random_side(&mut rng);
        let w1 = random_side(&mut rng);
        let (o0, o1) = (w0[0].len(), w1[0].len());
        let cond = |pa: f64, w: &Vec<Vec<f64>>| -> f64 {
            let probs: Vec<f64> =
                (0..2).flat_map(|a| w[a].iter().map(move |&x| x * if a == 0 { 1.0 - pa } else { pa })).collect();
            JointDistribution::new(2, w[0].len(), probs).unwrap().conditional_entropy()
        };
        let h0 = cond(pa[0], &w0);
        let h1 = cond(pa[1], &w1);
        let mut probs = vec![0.0; 2 * o0 * o1];
        for a0 in 0..2 {
            for a1 in 0..2 {
                let pr = (if a0 == 0 { 1.0 - pa[0] } else { pa[0] }) * (if a1 == 0 { 1.0 - pa[1] } else { pa[1] });
                for b0 in 0..o0 {
                    for b1 in 0..o1 {
                        probs[(a0 ^ a1) * o0 * o1 + b0 * o1 + b1] += pr * w0[a0][b0] * w1[a1][b1];
                    }
                }
            }
        }
        let hc = JointDistribution::new(2, o0 * o1, probs).unwrap().conditional_entropy();
        worst = worst.min(hc - mgl_lower_bound(&[h0.clamp(0.0, 1.0), h1.clamp(0.0, 1.0)]).unwrap());
    }
    let mut step = 0.0f64;
    for i in 0..1000 {
        let x = i as f64 / 999.0;
        step = step.max(1.0 - binary_entropy((1.0 - x) / 2.0).unwrap() - x * x);
    }
    outcome(
        worst >= -TOL && step <= 1e-12,
        format!("min H(C|B) - bound = {worst:.3e} over {trials} instances; max (1-h((1-x)/2)) - x^2 = {step:.3e}"),
    )
}

fn c10_entropy_kernel() -> Outcome {
    let mut inv = 0.0f64;
    for i in 0..1000 {
        let y = i as f64 / 999.0;
        inv = inv.max((binary_entropy(binary_entropy_inv(y).unwrap()).unwrap() - y).abs());
    }
    let mut st = 0.0f64;
    for q in [0.0, 0.01, 0.1, 0.25, 0.37, 0.5] {
        let mut acc = 0.0;
        for n in 1..=64u32 {
            acc = star(acc, q);
            st = st.max((star_iter(q, n) - acc).abs());
        }
    }
    let mut round = 0.0f64;
    for i in 0..=100 {
        let q = 0.5 * i as f64 / 100.0;
        round = round.max((q_from_eps(bsc_eps(q).unwrap()).unwrap() - q).abs());
        let e = i as f64 / 100.0;
        round = round.max((bsc_eps(q_from_eps(e).unwrap()).unwrap() - e).abs());
    }
    outcome(
        inv <= 1e-10 && st <= 1e-12 && round <= TOL,
        format!("h(h^-1(y)) err {inv:.1e}; star_iter err {st:.1e}; eps/q round trip err {round:.1e}"),
    )
}

fn c11_conversion() -> Outcome {
    let mut worst = 0.0f64;
    for eps in [0.0, 0.05, 0.2, 0.5, 0.8, 0.99, 1.0] {
        let d = delta_from_eps(eps).unwrap();
        for nt in 1..=8usize {
            for tp in 0..nt {
                let (ds, ss) = mis_to_ds_ss(bound_bitwise(nt, tp, eps).unwrap()).unwrap();
                let expect = 2f64.sqrt() * d.powi((nt - tp) as i32);
                worst = worst.max((ds - expect).abs()).max((ss - expect).abs());
            }
        }
    }
    outcome(worst <= 1e-12, format!("max |converted - sqrt2 delta^(N~-t')| = {worst:.1e}"))
}

fn c12_cli() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_leakshare");
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/n_sweep.toml");
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let status = Command::new(bin).args(["verify", config, "--seed", "7", "--out"]).arg(&csv).status().unwrap();
    if status.code() != Some(0) {
        return outcome(false, format!("verify exited with {status}"));
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    let header_ok = text.lines().next() == Some("axis,bound,exact,margin");
    let rows = text.lines().count() - 1;
    let mut svgs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("plot{i}.svg"));
        let st = Command::new(bin).arg("plot").arg(&csv).arg("--out").arg(&out).status().unwrap();
        if !st.success() {
            return outcome(false, format!("plot exited with {st}"));
        }
        svgs.push(std::fs::read(&out).unwrap());
    }
    let identical = svgs[0] == svgs[1];
    outcome(header_ok && identical && rows == 6, format!("exit 0, header ok: {header_ok}, {rows} rows, identical SVG: {identical}"))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("scheme round trip", Duration::from_secs(10), c1_round_trip),
        ("perfect secrecy below threshold", Duration::from_secs(30), c2_perfect_secrecy),
        ("closed-form oracle anchor", Duration::from_secs(5), c3_closed_form),
        ("BSC bitwise bound soundness", Duration::from_secs(60), c4_bsc_soundness),
        ("uniform-secret bitwise bound soundness", Duration::from_secs(120), c5_uniform_soundness),
        ("sum bound soundness", Duration::from_secs(120), c6_sum_soundness),
        ("collusion reduction equivalence", Duration::from_secs(60), c7_collusion_equivalence),
        ("Markov chain for parity inputs", Duration::from_secs(30), c8_markov),
        ("Mrs. Gerber's Lemma", Duration::from_secs(10), c9_mgl),
        ("entropy kernel", Duration::from_secs(1), c10_entropy_kernel),
        ("metric conversion", Duration::from_secs(10), c11_conversion),
        ("CLI end to end", Duration::from_secs(60), c12_cli),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let in_time = took <= *limit;
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {name}: {} ({}; {:.2}s, limit {}s{})",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", over time" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
