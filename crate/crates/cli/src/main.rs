//! `qcanon`: canonical bases, crystals, adapted algebras and verification
//! suites from the command line.
//!
//! Exit status: 0 when everything checked holds, 1 when a verification suite
//! found violations, 2 on errors.

mod cache;
mod error;
mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand, ValueEnum};

use qcanon_core::adapted::{
    adapted_algebra, bz_verify, center_parameters, cone, qcenter_decompose, qcenter_tests, sigma_cone, verify_adapted,
    VerificationReport,
};
use qcanon_core::canonical::CanonicalBasis;
use qcanon_core::cartan::{format_letters, parse_coords, weights_up_to_height, CartanData, ReducedWord, RootVec, Weight};
use qcanon_core::crystal::{CrystalGraph, InfinityCrystal, ModuleCrystal};
use qcanon_core::freealg::format_word;
use qcanon_core::session::Session;
use qcanon_core::suites;

use cache::Cache;
use error::CliError;
use output::*;

#[derive(Parser, Debug)]
#[command(name = "qcanon", version, about = "Canonical bases of U_q(n), crystals and adapted algebras")]
struct Cli {
    /// Cartan type such as A2, B2, G2, A3; a bare letter takes its rank from --rank.
    #[arg(long = "type", global = true, default_value = "A2")]
    type_label: String,
    #[arg(long, global = true)]
    rank: Option<usize>,
    /// Reduced word of the longest element, 1-based digits. `verify` also
    /// accepts a comma-separated list or `all`.
    #[arg(long, global = true)]
    word: Option<String>,
    /// Largest weight height examined.
    #[arg(long, global = true, default_value_t = 6)]
    height: i64,
    /// Directory for the result cache; no caching when absent.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for multi-word verification.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Keep wall-clock times in reports; they are zeroed otherwise so output is reproducible.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Canonical,
    Dual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    /// Multiplicative pairs of dual canonical elements q-commute.
    Bz,
    /// The adapted algebra of (--word, --gen-word) is spanned by dual canonical elements.
    Adapted,
    /// Multiplicativity against the q-center and the center factorization.
    Qcenter,
    /// The two A2 cones.
    Example1,
    /// The six B2 cones, the center semigroup and the factorization over their generators.
    Example2,
    /// Serre elements lie in the radical of the pairing.
    SerrePairing,
    /// Dual PBW elements are dual to PBW F-monomials.
    PbwDuality,
    /// Root vector commutators respect the lex filtration.
    Filtration,
    /// Twisted bar/sigma identity and recognition of dual canonical elements.
    TwistedIdentity,
}

impl Suite {
    fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Canonical or dual canonical slices.
    Basis {
        #[arg(long, value_enum, default_value_t = Kind::Dual)]
        kind: Kind,
        /// A single weight in simple-root coordinates, e.g. `1,1`.
        #[arg(long)]
        weight: Option<String>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Word whose adapted algebra is tested by `adapted`; defaults to --word.
        #[arg(long)]
        gen_word: Option<String>,
    },
    /// Crystal graphs and string parameters.
    Crystal {
        #[command(subcommand)]
        what: CrystalCommand,
    },
    /// Generators of the parameter semigroup of an adapted algebra.
    Cone {
        /// Word of the adapted algebra; defaults to --word.
        #[arg(long)]
        gen_word: Option<String>,
        /// Apply the antiautomorphism sigma to the generators.
        #[arg(long)]
        sigma: bool,
    },
    /// Parameters of the q-center and the decomposition of one parameter.
    Center {
        #[arg(long)]
        param: Option<String>,
    },
    /// Parameters and q-commutation exponents of the quantum minors.
    Adapted,
}

#[derive(Subcommand, Debug)]
enum CrystalCommand {
    /// The crystal graph of the simple module of highest weight --hw.
    Graph {
        /// Highest weight in fundamental-weight coordinates, e.g. `1,0`.
        #[arg(long)]
        hw: String,
    },
    /// String parameters of the canonical element with Lusztig parameter --param.
    String {
        #[arg(long)]
        param: String,
        /// Word for the string recursion; defaults to --word.
        #[arg(long)]
        string_word: Option<String>,
    },
}

/// Validated global options.
struct RunConfig {
    cartan: CartanData,
    type_label: String,
    words: Vec<ReducedWord>,
    height: i64,
    format: Format,
    jobs: usize,
    timings: bool,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let label = match cli.rank {
            Some(r) if cli.type_label.chars().all(|c| c.is_ascii_alphabetic()) => format!("{}{r}", cli.type_label),
            _ => cli.type_label.clone(),
        };
        let cartan = CartanData::parse(&label)?;
        if let Some(r) = cli.rank {
            if r != cartan.rank() {
                return Err(CliError::Usage(format!("--rank {r} does not match type {label}")));
            }
        }
        if cli.height < 1 {
            return Err(CliError::Usage("--height must be positive".into()));
        }
        if cli.jobs < 1 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        let words = match cli.word.as_deref() {
            None => vec![ReducedWord::new(&cartan, cartan.some_reduced_word_w0())?],
            Some("all") => cartan.reduced_words_w0(),
            Some(s) => s.split(',').map(|w| ReducedWord::parse(&cartan, w.trim())).collect::<Result<_, _>>()?,
        };
        Ok(RunConfig {
            type_label: cartan.label.to_string(),
            cartan,
            words,
            height: cli.height,
            format: cli.format,
            jobs: cli.jobs,
            timings: cli.timings,
        })
    }

    fn word(&self) -> Result<&ReducedWord, CliError> {
        match self.words.as_slice() {
            [w] => Ok(w),
            _ => Err(CliError::Usage("this command takes a single --word".into())),
        }
    }

    /// A session whose cap also covers every root vector.
    fn session(&self, cap: i64) -> Session {
        let top = self.cartan.positive_roots().iter().map(RootVec::height).max().unwrap_or(1);
        Session::new(self.cartan.clone(), cap.max(top))
    }

    fn parse_word(&self, s: Option<&str>) -> Result<ReducedWord, CliError> {
        match s {
            Some(s) => Ok(ReducedWord::parse(&self.cartan, s)?),
            None => Ok(self.word()?.clone()),
        }
    }

    fn parse_vec(&self, s: &str, len: usize, what: &str) -> Result<Vec<i64>, CliError> {
        let v = parse_coords(s)?;
        if v.len() != len || v.iter().any(|&x| x < 0) {
            return Err(CliError::Usage(format!("{what} needs {len} nonnegative entries, got {s}")));
        }
        Ok(v)
    }

    /// Height of `lambda - w0 lambda`, the depth of the lowest weight of V(lambda).
    fn depth(&self, lambda: &Weight) -> i64 {
        let c = &self.cartan;
        c.weight_to_rootvec(&lambda.sub(&c.longest_element_action(lambda))).map_or(0, |r| r.height())
    }

    /// Largest height of a q-center generator; maximality searches need this
    /// much room above the tested height.
    fn center_height(&self) -> i64 {
        let n = self.cartan.rank();
        (0..n).map(|k| self.depth(&Weight::fundamental(n, k))).max().unwrap_or(0)
    }
}

/// Rendered output and whether it reports a violation.
struct Outcome {
    text: String,
    violation: bool,
}

fn unsupported(fmt: Format, what: &str) -> CliError {
    CliError::Usage(format!("{what} has no {fmt:?} output"))
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn slice_of(cb: &CanonicalBasis, kind: Kind, beta: &RootVec) -> Result<Slice, CliError> {
    let (indices, transition, elements) = match kind {
        Kind::Canonical => {
            let s = cb.canonical_slice(beta)?;
            (s.indices.clone(), s.transition.clone(), s.elements.clone())
        }
        Kind::Dual => {
            let s = cb.dual_canonical_slice(beta)?;
            (s.indices.clone(), s.transition.clone(), s.elements.clone())
        }
    };
    let basis = cb.pbw.alg.basis(beta)?;
    let pivots: Vec<String> = basis.pivot_words().into_iter().map(|w| format_word(w)).collect();
    let elements = indices
        .iter()
        .enumerate()
        .map(|(j, m)| BasisElement {
            m: m.clone(),
            expansion_pbw: indices
                .iter()
                .enumerate()
                .filter(|(n, _)| !transition[*n][j].is_zero())
                .map(|(n, idx)| PbwTerm { n: idx.clone(), coeff: transition[n][j].clone() })
                .collect(),
            expansion_words: pivots
                .iter()
                .zip(&elements[j])
                .filter(|(_, c)| !c.is_zero())
                .map(|(w, c)| WordTerm { word: w.clone(), coeff: c.clone() })
                .collect(),
        })
        .collect();
    Ok(Slice { word: cb.word(), weight: beta.0.clone(), elements })
}

fn cmd_basis(cfg: &RunConfig, cache: &mut Cache, kind: Kind, weight: Option<&str>) -> Result<Outcome, CliError> {
    let n = cfg.cartan.rank();
    let weights = match weight {
        Some(s) => vec![RootVec(cfg.parse_vec(s, n, "--weight")?)],
        None => weights_up_to_height(n, cfg.height),
    };
    let cap = weights.iter().map(RootVec::height).max().unwrap_or(1);
    let ses = cfg.session(cap);
    let cb = ses.basis(cfg.word()?)?;
    let kind_name = match kind {
        Kind::Canonical => "canonical",
        Kind::Dual => "dual",
    };
    let mut slices = Vec::with_capacity(weights.len());
    for beta in &weights {
        let key = format!("slice|{}|{}|{kind_name}|{beta}", cfg.type_label, cb.word());
        slices.push(cache.get_or_compute(&key, || slice_of(&cb, kind, beta))?);
    }
    let word = cb.word();
    let text = match cfg.format {
        Format::Json => json(&BasisDoc {
            schema: BASIS_SCHEMA,
            type_label: &cfg.type_label,
            word: &word,
            kind: kind_name,
            slices: &slices,
        })?,
        Format::Tsv => {
            let mut t = String::from("weight\tm\tn\tcoefficient\n");
            for s in &slices {
                for e in &s.elements {
                    for term in &e.expansion_pbw {
                        let _ = writeln!(t, "{}\t{}\t{}\t{}", fmt_param(&s.weight), fmt_param(&e.m), fmt_param(&term.n), term.coeff);
                    }
                }
            }
            t
        }
        Format::Dot => return Err(unsupported(cfg.format, "basis")),
    };
    Ok(Outcome { text, violation: false })
}

fn run_suite(cfg: &RunConfig, ses: &Session, suite: Suite, word: &ReducedWord, gen: Option<&ReducedWord>) -> Result<VerificationReport, CliError> {
    let h = cfg.height;
    let cb = ses.basis(word)?;
    Ok(match suite {
        Suite::Bz => bz_verify(&cb, h)?,
        Suite::Adapted => {
            let g = ses.basis(gen.unwrap_or(word))?;
            verify_adapted(&cb, &cone(&cb, &g)?, h)?
        }
        Suite::Qcenter => qcenter_tests(&cb, h)?,
        Suite::PbwDuality => suites::pbw_duality(&cb, h)?,
        Suite::Filtration => suites::ls_filtration(&cb)?,
        Suite::TwistedIdentity => suites::twisted_identity(&cb, h)?,
        Suite::Example1 | Suite::Example2 | Suite::SerrePairing => unreachable!("handled without a word"),
    })
}

/// Runs `suite` on every configured word, `jobs` at a time, keeping the
/// reports in word order.
fn verify_words(
    cfg: &RunConfig,
    ses: &Session,
    suite: Suite,
    words: &[ReducedWord],
    gen: Option<&ReducedWord>,
) -> Result<Vec<VerificationReport>, CliError> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<VerificationReport, CliError>>>> =
        Mutex::new((0..words.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..cfg.jobs.min(words.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(w) = words.get(i) else { break };
                let r = run_suite(cfg, ses, suite, w, gen);
                slots.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("worker panicked").into_iter().map(|r| r.expect("every word ran")).collect()
}

fn cmd_verify(cfg: &RunConfig, cache: &mut Cache, suite: Suite, gen_word: Option<&str>) -> Result<Outcome, CliError> {
    let h = cfg.height;
    let name = suite.name();
    let gen = gen_word.map(|s| cfg.parse_word(Some(s))).transpose()?;
    let key = |word: &str| {
        format!("report|{name}|{}|{word}|{}|{h}", cfg.type_label, gen.as_ref().map(|g| format_letters(&g.letters)).unwrap_or_default())
    };
    let reports = match suite {
        Suite::Example1 => {
            let ses = Session::parse("A2", 6)?;
            vec![cache.get_or_compute(&key("121"), || Ok(suites::example1(&ses)?))?]
        }
        Suite::Example2 => {
            let ses = Session::parse("B2", h.max(h.min(6) + 4))?;
            vec![cache.get_or_compute(&key("2121"), || Ok(suites::example2(&ses, h)?))?]
        }
        Suite::SerrePairing => {
            // the Serre elements of G2 have height 5
            let ses = cfg.session(5);
            vec![cache.get_or_compute(&key(""), || Ok(suites::serre_pairing(&ses.alg)?))?]
        }
        _ => {
            let cap = match suite {
                Suite::Adapted | Suite::Qcenter => h + cfg.center_height(),
                _ => h,
            };
            let words: Vec<String> = cfg.words.iter().map(|w| format_letters(&w.letters)).collect();
            let mut cached: Vec<Option<VerificationReport>> = Vec::new();
            let mut todo = Vec::new();
            for (w, rw) in words.iter().zip(&cfg.words) {
                let hit = cache.lookup(&key(w));
                if hit.is_none() {
                    todo.push(rw.clone());
                }
                cached.push(hit);
            }
            if !todo.is_empty() {
                let ses = cfg.session(cap);
                let mut fresh = verify_words(cfg, &ses, suite, &todo, gen.as_ref())?.into_iter();
                for (slot, w) in cached.iter_mut().zip(&words) {
                    if slot.is_none() {
                        let r = fresh.next().expect("one report per word");
                        *slot = Some(cache.store(&key(w), &r)?);
                    }
                }
            }
            cached.into_iter().map(|r| r.expect("filled")).collect()
        }
    };
    for r in &reports {
        eprintln!("{} {} {}: {} ms", name, r.type_label, r.word, r.elapsed_ms);
    }
    report_outcome(cfg.format, cfg.timings, &name, reports)
}

/// Renders reports; any failed report is a violation.
fn report_outcome(format: Format, timings: bool, name: &str, mut reports: Vec<VerificationReport>) -> Result<Outcome, CliError> {
    if !timings {
        reports.iter_mut().for_each(|r| r.elapsed_ms = 0);
    }
    let passed = reports.iter().all(VerificationReport::passed);
    let text = match format {
        Format::Json => json(&ReportDoc { schema: REPORT_SCHEMA, suite: name, passed, reports: &reports })?,
        Format::Tsv => {
            let mut t = String::from("type\tword\theight\texamined\tq_commuting\tmultiplicative\tviolations\tskipped\tstatus\n");
            for r in &reports {
                let v = r.mult_not_qcommute.len() + r.qcommute_not_mult.len() + r.failures.len();
                let status = if r.passed() { "pass" } else { "fail" };
                let _ = writeln!(
                    t,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{v}\t{}\t{status}",
                    r.type_label, r.word, r.height, r.pairs_examined, r.q_commuting, r.multiplicative, r.skipped
                );
            }
            t
        }
        Format::Dot => return Err(unsupported(format, "verify")),
    };
    Ok(Outcome { text, violation: !passed })
}

fn cmd_crystal(cfg: &RunConfig, cache: &mut Cache, what: &CrystalCommand) -> Result<Outcome, CliError> {
    let n = cfg.cartan.rank();
    let word = cfg.word()?;
    let w = format_letters(&word.letters);
    match what {
        CrystalCommand::Graph { hw } => {
            let lambda = Weight(cfg.parse_vec(hw, n, "--hw")?);
            let depth = cfg.depth(&lambda);
            let key = format!("crystal-graph|{}|{w}|{lambda}", cfg.type_label);
            let g: CrystalGraph = cache.get_or_compute(&key, || {
                let ses = cfg.session(depth);
                let mc = ModuleCrystal::new(ses.basis(word)?, lambda.clone(), depth)?;
                Ok(mc.graph()?)
            })?;
            let text = match cfg.format {
                Format::Dot => g.to_dot(),
                Format::Json => json(&GraphDoc { schema: GRAPH_SCHEMA, type_label: &cfg.type_label, word: &w, graph: &g })?,
                Format::Tsv => {
                    let mut t = String::from("source\tcolor\ttarget\n");
                    for (v, row) in g.f.iter().enumerate() {
                        for (i, target) in row.iter().enumerate() {
                            if let Some(target) = target {
                                let _ = writeln!(t, "{}\t{}\t{}", fmt_param(&g.labels[v]), i + 1, fmt_param(&g.labels[*target]));
                            }
                        }
                    }
                    t
                }
            };
            Ok(Outcome { text, violation: false })
        }
        CrystalCommand::String { param, string_word } => {
            let m = cfg.parse_vec(param, word.len(), "--param")?;
            let sw = cfg.parse_word(string_word.as_deref().or(Some(&w)))?;
            let key = format!("crystal-string|{}|{w}|{}|{}", cfg.type_label, fmt_param(&m), format_letters(&sw.letters));
            let out: StringOut = cache.get_or_compute(&key, || {
                let ses = cfg.session(1);
                let h = ses.basis(word)?.pbw.weight_of(&m).height();
                let ses = cfg.session(h + 1);
                let ic = InfinityCrystal::new(ses.basis(word)?, h)?;
                let d = ic.string_param(&sw.letters, &m)?;
                Ok(StringOut { param_word: w.clone(), param: m.clone(), string_word: d.word, string: d.a })
            })?;
            let text = match cfg.format {
                Format::Json => json(&Tagged { schema: STRING_SCHEMA, type_label: &cfg.type_label, body: &out })?,
                Format::Tsv => format!(
                    "param_word\tparam\tstring_word\tstring\n{}\t{}\t{}\t{}\n",
                    out.param_word,
                    fmt_param(&out.param),
                    out.string_word,
                    fmt_param(&out.string)
                ),
                Format::Dot => return Err(unsupported(cfg.format, "crystal string")),
            };
            Ok(Outcome { text, violation: false })
        }
    }
}

fn cmd_cone(cfg: &RunConfig, cache: &mut Cache, gen_word: Option<&str>, sigma: bool) -> Result<Outcome, CliError> {
    let word = cfg.word()?;
    let gen = cfg.parse_word(gen_word)?;
    let (w, g) = (format_letters(&word.letters), format_letters(&gen.letters));
    let key = format!("cone|{}|{w}|{g}|{sigma}", cfg.type_label);
    let out: ConeOut = cache.get_or_compute(&key, || {
        let ses = cfg.session(2 * cfg.center_height());
        let cb = ses.basis(word)?;
        let mut c = cone(&cb, &*ses.basis(&gen)?)?;
        if sigma {
            c = sigma_cone(&cb, &c)?;
        }
        Ok(ConeOut {
            param_word: w.clone(),
            gen_word: g.clone(),
            sigma,
            simplicial: c.is_simplicial(),
            unimodular: c.generates_lattice(),
            generators: c.generators,
        })
    })?;
    let text = match cfg.format {
        Format::Json => json(&Tagged { schema: CONE_SCHEMA, type_label: &cfg.type_label, body: &out })?,
        Format::Tsv => out.generators.iter().map(|p| p.iter().map(i64::to_string).collect::<Vec<_>>().join("\t") + "\n").collect(),
        Format::Dot => return Err(unsupported(cfg.format, "cone")),
    };
    Ok(Outcome { text, violation: false })
}

fn cmd_center(cfg: &RunConfig, cache: &mut Cache, param: Option<&str>) -> Result<Outcome, CliError> {
    let word = cfg.word()?;
    let w = format_letters(&word.letters);
    let m = param.map(|p| cfg.parse_vec(p, word.len(), "--param")).transpose()?;
    let key = format!("center|{}|{w}", cfg.type_label);
    let generators: Vec<Vec<i64>> = cache.get_or_compute(&key, || {
        let ses = cfg.session(2 * cfg.center_height());
        Ok(center_parameters(&*ses.basis(word)?)?)
    })?;
    let decomposition = m.map(|m| {
        let (z, h) = qcenter_decompose(&m, &word.letters, &generators);
        Decomposition { param: m, center_part: z, rest: h }
    });
    let out = CenterOut { word: w, generators, decomposition };
    let text = match cfg.format {
        Format::Json => json(&Tagged { schema: CENTER_SCHEMA, type_label: &cfg.type_label, body: &out })?,
        Format::Tsv => {
            let mut t = String::from("fundamental\tparam\n");
            for (k, g) in out.generators.iter().enumerate() {
                let _ = writeln!(t, "{}\t{}", k + 1, fmt_param(g));
            }
            if let Some(d) = &out.decomposition {
                let _ = writeln!(t, "# {} = {} + {}", fmt_param(&d.param), fmt_param(&d.center_part), fmt_param(&d.rest));
            }
            t
        }
        Format::Dot => return Err(unsupported(cfg.format, "center")),
    };
    Ok(Outcome { text, violation: false })
}

fn cmd_adapted(cfg: &RunConfig, cache: &mut Cache) -> Result<Outcome, CliError> {
    let word = cfg.word()?;
    let w = format_letters(&word.letters);
    let key = format!("adapted|{}|{w}", cfg.type_label);
    let out: AdaptedOut = cache.get_or_compute(&key, || {
        let ses = cfg.session(2 * cfg.center_height());
        let minors = adapted_algebra(&*ses.basis(word)?)?;
        Ok(AdaptedOut { word: minors.word, params: minors.params, q_commute: minors.q_commute })
    })?;
    let text = match cfg.format {
        Format::Json => json(&Tagged { schema: ADAPTED_SCHEMA, type_label: &cfg.type_label, body: &out })?,
        Format::Tsv => {
            let mut t = String::from("r\tletter\tparam\n");
            for (r, (p, l)) in out.params.iter().zip(&word.letters).enumerate() {
                let _ = writeln!(t, "{}\t{}\t{}", r + 1, l + 1, fmt_param(p));
            }
            t
        }
        Format::Dot => return Err(unsupported(cfg.format, "adapted")),
    };
    Ok(Outcome { text, violation: false })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    let mut cache = Cache::new(cli.cache_dir.as_deref())?;
    let out = match &cli.command {
        Command::Basis { kind, weight } => cmd_basis(&cfg, &mut cache, *kind, weight.as_deref()),
        Command::Verify { suite, gen_word } => cmd_verify(&cfg, &mut cache, *suite, gen_word.as_deref()),
        Command::Crystal { what } => cmd_crystal(&cfg, &mut cache, what),
        Command::Cone { gen_word, sigma } => cmd_cone(&cfg, &mut cache, gen_word.as_deref(), *sigma),
        Command::Center { param } => cmd_center(&cfg, &mut cache, param.as_deref()),
        Command::Adapted => cmd_adapted(&cfg, &mut cache),
    }?;
    if cli.cache_dir.is_some() {
        eprintln!("cache: {} hits, {} misses", cache.hits, cache.misses);
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(u8::from(out.violation))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_reports_are_violations() {
        let ok = VerificationReport { elapsed_ms: 7, ..Default::default() };
        let bad = VerificationReport { qcommute_not_mult: vec![(vec![1], vec![0])], ..Default::default() };
        let out = report_outcome(Format::Json, false, "bz", vec![ok.clone()]).unwrap();
        assert!(!out.violation);
        assert!(out.text.contains("\"elapsed_ms\": 0"));
        let out = report_outcome(Format::Tsv, true, "bz", vec![ok, bad]).unwrap();
        assert!(out.violation);
        assert!(out.text.lines().last().unwrap().ends_with("\tfail"));
        assert!(report_outcome(Format::Dot, false, "bz", vec![]).is_err());
    }

    #[test]
    fn rank_completes_a_bare_letter() {
        let cli = Cli::parse_from(["qcanon", "--type", "B", "--rank", "2", "adapted"]);
        assert_eq!(RunConfig::from_cli(&cli).unwrap().type_label, "B2");
        let cli = Cli::parse_from(["qcanon", "--type", "B2", "--rank", "3", "adapted"]);
        assert!(RunConfig::from_cli(&cli).is_err());
    }

    #[test]
    fn words_are_validated_before_dispatch() {
        let cli = Cli::parse_from(["qcanon", "--type", "A2", "--word", "12", "adapted"]);
        assert!(RunConfig::from_cli(&cli).is_err());
        let cli = Cli::parse_from(["qcanon", "--type", "B2", "--word", "all", "adapted"]);
        assert_eq!(RunConfig::from_cli(&cli).unwrap().words.len(), 2);
    }
}
