//! Walks through the analysis of one link: expected molecule counts, the
//! error-probability curve over the detection threshold, the optimal
//! threshold, and a Monte-Carlo spot check of the analytic result.
//!
//! ```bash
//! cargo run --release --example link_analysis
//! ```

use mcvd::ber::{self, AnalyticModel, DistanceDistribution};
use mcvd::channel::SystemParams;
use mcvd::expectations;
use mcvd::simulator::{estimate_ber, SamplingMode, SimConfig};

fn main() {
    let params = SystemParams {
        mu: 5.0, // strong degradation keeps ISI negligible here
        ..SystemParams::reference()
    };
    let rd = 10.0;

    println!("=== link at rd = {rd} um ===\n");

    let b = expectations::expected_total(rd, &SystemParams::reference()).unwrap();
    println!("expected counts per slot (mu = 1/s):");
    println!("  desired signal  E_S = {:7.4}", b.e_s);
    println!("  tagged-TX ISI   E_I = {:7.4}", b.e_i);
    println!("  field CCI       E_C = {:7.4}", b.e_c);
    println!("  total           E_T = {:7.4}\n", b.e_t);

    println!("error probability vs detection threshold (mu = 5/s):");
    println!("  eta | peb0      peb1      pe");
    let scan = ber::ber_scan_fixed(rd, 1, 12, &params).unwrap();
    for r in &scan[1..] {
        println!("  {:3} | {:.3e} {:.3e} {:.3e}", r.eta, r.peb0, r.peb1, r.pe);
    }
    let (eta_opt, pe_min) = ber::optimal_threshold(rd, &params, AnalyticModel::NoIsi, 30).unwrap();
    println!("\noptimal threshold eta* = {eta_opt} with pe = {pe_min:.4e}");

    let cfg = SimConfig::new(params, DistanceDistribution::Fixed(rd), eta_opt);
    let mc = estimate_ber(&cfg, SamplingMode::ForcedConditional).unwrap();
    println!(
        "monte carlo at eta*: pe = {:.4e} +/- {:.1e} ({} realizations per conditional)",
        mc.pe.mean, mc.pe.half_width_95, cfg.realizations
    );
    let z = (pe_min - mc.pe.mean) / mc.pe.std_error();
    println!("analytic vs simulation: z = {z:+.2}");
}
