// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use lfr_bench::config::ConfigArgs;
use lfr_bench::io;
use lfr_bench::sweep::run_sweep;
use lfr_core::detection::{detect, Algorithm};
use lfr_core::evaluation::nmi;
use lfr_core::metrics::topology_report;
use lfr_core::planting::{measure_mixing, plant};
use lfr_core::RandomSource;
use serde_json::json;

const EXIT_CONFIG: u8 = 1;
const EXIT_PARTIAL: u8 = 2;

#[derive(Parser)]
#[command(name = "lfrbench", version, about = "Benchmark graphs with planted communities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plant one network at `mu` and write edges, membership and a summary
    /// under `out`.
    Generate(ConfigArgs),
    /// Print the topology report of an edge list.
    Measure {
        #[arg(long)]
        graph: PathBuf,
        /// Membership file; adds the measured mixing to the report.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Run one detection algorithm and write the partition found.
    Detect {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "louvain")]
        algorithm: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Membership output; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalized mutual information between two membership files.
    Evaluate {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        found: PathBuf,
        /// Node count; taken from `graph` or from the truth file otherwise.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Run a full mu sweep into `out`, resuming completed rows.
    Sweep(ConfigArgs),
}

struct Failure {
    code: u8,
    message: String,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: e.to_string(),
        }
    }
}

fn report_json(r: &lfr_core::metrics::TopologyReport) -> serde_json::Value {
    json!({
        "avg_distance": r.avg_distance,
        "unreachable_pairs": r.unreachable_pairs,
        "transitivity_global": r.transitivity_global,
        "clustering_local_avg": r.clustering_local_avg,
        "assortativity": r.assortativity,
        "centralization_degree": r.centralization_degree,
        "centralization_closeness": r.centralization_closeness,
        "centralization_betweenness": r.centralization_betweenness,
        "degree_mean": r.degree_mean,
        "degree_max": r.degree_max,
        "fitted_gamma": r.fitted_gamma.filter(|g| g.is_finite()),
    })
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value")
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate(args) => {
            let cfg = args.resolve()?;
            let mut rng = RandomSource::new(cfg.base_seed);
            let net = plant(&cfg.seed_model(), &cfg.planting(cfg.mu), &mut rng)?;
            std::fs::create_dir_all(&cfg.out).map_err(|e| format!("{}: {e}", cfg.out.display()))?;
            io::write_edge_list(&net.graph, &cfg.out.join("edges.tsv"))?;
            io::write_membership(&net.truth, &cfg.out.join("membership.tsv"))?;
            let summary = pretty(&json!({
                "model": cfg.model.name(),
                "n": net.graph.n(),
                "edges": net.graph.edge_count(),
                "seed": cfg.base_seed,
                "rng": RandomSource::ALGORITHM,
                "mu": cfg.mu,
                "achieved_mu": net.achieved_mu_mean,
                "mu_limit": net.mu_limit,
                "converged": net.converged,
                "communities": net.truth.community_count(),
                "swaps": net.swaps,
                "sweeps": net.sweeps,
            }));
            std::fs::write(cfg.out.join("summary.json"), format!("{summary}\n"))?;
            println!("{summary}");
        }
        Command::Measure { graph, truth } => {
            let g = io::read_edge_list(&graph)?;
            let mut v = report_json(&topology_report(&g)?);
            v["n"] = json!(g.n());
            v["edges"] = json!(g.edge_count());
            if let Some(path) = truth {
                let p = io::ingest_external_partition(&path, g.n())?;
                let mix = measure_mixing(&g, &p)?;
                v["mixing"] = json!(mix.mean);
                v["communities"] = json!(p.community_count());
            }
            println!("{}", pretty(&v));
        }
        Command::Detect {
            graph,
            algorithm,
            seed,
            out,
        } => {
            let g = io::read_edge_list(&graph)?;
            let alg = Algorithm::from_str(&algorithm)?;
            let d = detect(&g, alg, seed)?;
            let info = pretty(&json!({
                "algorithm": alg.name(),
                "communities": d.partition.community_count(),
                "modularity": d.modularity,
                "converged": d.converged,
                "seconds": d.elapsed.as_secs_f64(),
            }));
            match out {
                Some(path) => {
                    io::write_membership(&d.partition, &path)?;
                    println!("{info}");
                }
                None => {
                    print!("{}", io::format_membership(&d.partition));
                    eprintln!("{info}");
                }
            }
        }
        Command::Evaluate {
            truth,
            found,
            n,
            graph,
        } => {
            let n = match (n, graph) {
                (Some(n), _) => n,
                (None, Some(g)) => io::read_edge_list(&g)?.n(),
                (None, None) => io::count_membership_entries(&truth)?,
            };
            let t = io::ingest_external_partition(&truth, n)?;
            let f = io::ingest_external_partition(&found, n)?;
            println!("{}", nmi(&t, &f)?);
        }
        Command::Sweep(args) => {
            let cfg = args.resolve()?;
            let s = run_sweep(&cfg)?;
            eprintln!(
                "{} rows ({} resumed, {} failed) in {}",
                s.rows,
                s.resumed,
                s.failed,
                s.results.display()
            );
            if s.failed > 0 {
                return Err(Failure {
                    code: EXIT_PARTIAL,
                    message: format!("{} rows failed; see the error column", s.failed),
                });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("lfrbench: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
