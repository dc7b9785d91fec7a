//! Finds the first seed whose random-states Fgf8 sample set has a given
//! solution count, and optionally writes it out.
//!
//! cargo run --release -p grover-netlogic --example seed_search -- 16 4 [out.json]

use grover_netlogic::netmodel::{ProteinNetwork, SamplingMode};
use grover_netlogic::satcore::count_solutions;

const BUDGET: u64 = 100_000;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [count, want, rest @ ..] = args.as_slice() else {
        eprintln!("usage: seed_search <samples> <t> [out.json]");
        std::process::exit(2);
    };
    let count: usize = count.parse().expect("sample count");
    let want: u64 = want.parse().expect("solution count");
    let net = ProteinNetwork::cortex();
    for seed in 0..BUDGET {
        let c = net.sample_constraints("Fgf8", count, seed, SamplingMode::RandomStates).unwrap();
        if count_solutions(&c).unwrap() == want {
            println!("seed {seed}: J = {count}, t = {want}");
            if let Some(path) = rest.first() {
                c.save(path.as_ref()).unwrap();
            }
            return;
        }
    }
    println!("no seed below {BUDGET} gives t = {want}");
    std::process::exit(1);
}
