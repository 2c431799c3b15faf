use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use qflow::algebra::json::{element_to_json, word_to_json};
use qflow::algebra::{Algebra, AlgebraElement, BasisWord};
use qflow::config::{Config, Mode};
use qflow::evolution::{certify, cocycle_matrix_element, vacuum_semigroup, SeriesResult, StepFunction};
use qflow::generator::{default_sample, validate as validate_generator, Family, FlowGenerator};
use qflow::ito::verify_hoprod;
use qflow::oracles::{car_superop_expm, ctmc_expm, torus_multiplier};
use qflow::qrw::{growth_profile, iterate_with_cap, Probe};
use qflow::report::{fmt_e12, VerificationReport};
use qflow::{Error, Exact, Scalar, C64};

pub struct Run {
    pub config: PathBuf,
    pub out: PathBuf,
    pub mode: Option<Mode>,
    pub seed: u64,
}

pub enum Outcome {
    Pass,
    Fail,
}

pub enum Failure {
    /// Missing or malformed input: exit 2.
    Input(anyhow::Error),
    /// Anything else that stops the run: exit 1.
    Run(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Input(e.into()),
            _ => Failure::Run(e.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.into())
    }
}

type Result<T> = std::result::Result<T, Failure>;

impl Run {
    fn load(&self) -> Result<(Config, Mode)> {
        let text = fs::read_to_string(&self.config)
            .with_context(|| format!("reading {}", self.config.display()))
            .map_err(Failure::Input)?;
        let cfg = Config::parse(&text)?;
        let mode = self.mode.or(cfg.mode).unwrap_or(Mode::Exact);
        Ok((cfg, mode))
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        fs::create_dir_all(&self.out)?;
        let path = self.out.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display())).map_err(Failure::Run)?;
        Ok(())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn label<S: Scalar>(x: &AlgebraElement<S>) -> String {
    csv_field(&x.to_string())
}

fn word_label<S: Scalar>(alg: &Algebra<S>, w: &BasisWord) -> String {
    match word_to_json(alg, w) {
        serde_json::Value::String(s) => csv_field(&s),
        v => csv_field(&v.to_string()),
    }
}

fn pass_or_fail(ok: bool) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

// ------------------------------------------------------------- validate

pub fn validate(run: &Run) -> Result<Outcome> {
    let (cfg, mode) = run.load()?;
    match mode {
        Mode::Exact => validate_in::<Exact>(run, &cfg),
        Mode::Float => validate_in::<C64>(run, &cfg),
    }
}

fn random_products<S: Scalar>(gens: &[AlgebraElement<S>], count: usize, seed: u64) -> Vec<AlgebraElement<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    if gens.is_empty() {
        return out;
    }
    for _ in 0..count {
        let len = rng.gen_range(3..=4);
        let mut x = gens[rng.gen_range(0..gens.len())].clone();
        for _ in 1..len {
            x = &x * &gens[rng.gen_range(0..gens.len())];
        }
        if !x.is_zero() {
            out.push(x);
        }
    }
    out
}

fn validate_in<S: Scalar>(run: &Run, cfg: &Config) -> Result<Outcome> {
    let phi = cfg.generator::<S>()?;
    let gens = cfg.elements(&phi)?;
    let tol = cfg.validate.tol.unwrap_or(if S::EXACT { 0.0 } else { 1e-10 });
    let mut sample = default_sample(&gens, cfg.validate.depth);
    for x in random_products(&gens, cfg.validate.random_words, run.seed) {
        if !sample.contains(&x) {
            sample.push(x);
        }
    }
    let mut rep = validate_generator(&phi, &sample, tol)?;
    if cfg.validate.hoprod_n > 0 {
        for x in &gens {
            for y in &gens {
                rep.merge(verify_hoprod(&phi, x, y, cfg.validate.hoprod_n, tol)?);
            }
        }
    }
    write_report(run, &rep)?;
    print!("{rep}");
    Ok(pass_or_fail(rep.pass()))
}

fn write_report(run: &Run, rep: &VerificationReport) -> Result<()> {
    let doc = json!({ "pass": rep.pass(), "summary": rep.summary(), "report": rep });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Run(e.into()))?;
    run.write("report.json", &(text + "\n"))?;
    run.write("summary.txt", &rep.to_string())
}

// --------------------------------------------------------------- growth

pub fn growth(run: &Run) -> Result<Outcome> {
    let (cfg, mode) = run.load()?;
    match mode {
        Mode::Exact => growth_in::<Exact>(run, &cfg),
        Mode::Float => growth_in::<C64>(run, &cfg),
    }
}

fn growth_in<S: Scalar>(run: &Run, cfg: &Config) -> Result<Outcome> {
    let phi = cfg.generator::<S>()?;
    let mut csv = String::from("element,n,upper,lower,class\n");
    for x in cfg.elements(&phi)? {
        let p = growth_profile(&phi, &x, &cfg.growth, &Probe::Corners)?;
        for (n, (u, l)) in p.upper.iter().zip(&p.lower).enumerate() {
            let _ = writeln!(csv, "{},{n},{},{},{}", label(&x), fmt_e12(*u), fmt_e12(*l), p.class.label());
        }
        println!("{x}: {}", p.class.label());
    }
    run.write("growth.csv", &csv)?;
    Ok(Outcome::Pass)
}

// ------------------------------------------------------------ semigroup

fn float_note(mode: Mode) {
    if mode == Mode::Exact {
        println!("note: series evaluation runs in float mode");
    }
}

fn step_functions(cfg: &Config, d: usize) -> Result<Option<(StepFunction<C64>, StepFunction<C64>)>> {
    match (&cfg.semigroup.f, &cfg.semigroup.g) {
        (Some(f), Some(g)) => Ok(Some((StepFunction::from_json(d, f)?, StepFunction::from_json(d, g)?))),
        (None, None) => Ok(None),
        _ => Err(Failure::Input(anyhow!("semigroup needs both \"f\" and \"g\" or neither"))),
    }
}

pub fn semigroup(run: &Run) -> Result<Outcome> {
    let (cfg, mode) = run.load()?;
    float_note(mode);
    let phi = cfg.generator::<C64>()?;
    let fg = step_functions(&cfg, phi.d())?;
    let tol = cfg.semigroup.tol;
    let mut csv = String::from("t,element,word,re,im,error_bound\n");
    let mut results = Vec::new();
    for x in cfg.elements(&phi)? {
        let cert = match certify(&phi, &x, &cfg.growth) {
            Ok(c) => c,
            Err(Error::NotCertified(msg)) => {
                let _ = writeln!(csv, ",{},,,,not certified", label(&x));
                println!("{x}: not certified in A_phi ({msg})");
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for &t in &cfg.semigroup.times {
            let r: SeriesResult<C64> = match &fg {
                None => vacuum_semigroup(&phi, t, &x, &cert, tol)?,
                Some((f, g)) => cocycle_matrix_element(&phi, f, g, t, &x, &cert, tol)?,
            };
            for (w, c) in r.value.terms() {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    fmt_e12(t),
                    label(&x),
                    word_label(phi.algebra(), w),
                    fmt_e12(c.re),
                    fmt_e12(c.im),
                    fmt_e12(r.error_bound)
                );
            }
            results.push(json!({ "t": t, "element": element_to_json(&x), "result": r.to_json() }));
        }
    }
    run.write("semigroup.csv", &csv)?;
    let text = serde_json::to_string_pretty(&results).map_err(|e| Failure::Run(e.into()))?;
    run.write("semigroup.json", &(text + "\n"))?;
    Ok(Outcome::Pass)
}

// -------------------------------------------------------------- compare

struct Row {
    distance: f64,
    budget: f64,
}

fn oracle_row(phi: &FlowGenerator<C64>, s: &SeriesResult<C64>, t: f64, x: &AlgebraElement<C64>, floor: f64) -> Result<Row> {
    match phi.family() {
        Family::Walk { group, moves, transitions } => {
            let mut window = vec![qflow::algebra::GroupAdapter::identity(group)];
            for w in s.value.terms().keys().chain(x.terms().keys()) {
                if let BasisWord::GroupFn(g) = w {
                    window.push(g.clone());
                }
            }
            let o = ctmc_expm(group, moves, transitions, &window, t, x)?;
            let unit = s.value.unit_coeff();
            let distance = o
                .window
                .iter()
                .zip(&o.values)
                .map(|(g, v)| (unit + s.value.coeff(&BasisWord::GroupFn(g.clone())) - v).norm())
                .fold(0.0, f64::max);
            Ok(Row { distance, budget: floor + s.error_bound + o.error_bound })
        }
        Family::Torus { c1, c2, .. } => {
            let mut o = AlgebraElement::zero(phi.algebra());
            for (w, c) in x.terms() {
                if let BasisWord::Torus { m, n } = w {
                    o.add_scaled(&(c * torus_multiplier(t, *m, *n, *c1, *c2)), &AlgebraElement::word(phi.algebra(), w.clone()));
                }
            }
            Ok(Row { distance: (&s.value - &o).norm_bound().value, budget: floor + s.error_bound })
        }
        Family::Exclusion(p) => {
            let o = car_superop_expm(p, t, x)?;
            Ok(Row { distance: (&s.value - &o.value).norm_bound().value, budget: floor + s.error_bound + o.error_bound })
        }
        other => Err(Failure::Input(anyhow!("no oracle for the {} family", other.tag()))),
    }
}

pub fn compare(run: &Run) -> Result<Outcome> {
    let (cfg, mode) = run.load()?;
    float_note(mode);
    let phi = cfg.generator::<C64>()?;
    let mut csv = String::from("t,element,distance,budget,pass\n");
    let mut all = true;
    for x in cfg.elements(&phi)? {
        let cert = match certify(&phi, &x, &cfg.growth) {
            Ok(c) => c,
            Err(Error::NotCertified(_)) => {
                let _ = writeln!(csv, ",{},,,not certified", label(&x));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for &t in &cfg.compare.times {
            let s = vacuum_semigroup(&phi, t, &x, &cert, cfg.compare.tol)?;
            let row = oracle_row(&phi, &s, t, &x, cfg.compare.floor)?;
            let ok = row.distance <= row.budget;
            all &= ok;
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                fmt_e12(t),
                label(&x),
                fmt_e12(row.distance),
                fmt_e12(row.budget),
                ok
            );
        }
    }
    run.write("compare.csv", &csv)?;
    println!("compare: {}", if all { "PASS" } else { "FAIL" });
    Ok(pass_or_fail(all))
}

// -------------------------------------------------------------- iterate

pub fn iterate(run: &Run) -> Result<Outcome> {
    let (cfg, mode) = run.load()?;
    match mode {
        Mode::Exact => iterate_in::<Exact>(run, &cfg),
        Mode::Float => iterate_in::<C64>(run, &cfg),
    }
}

fn iterate_in<S: Scalar>(run: &Run, cfg: &Config) -> Result<Outcome> {
    let phi = cfg.generator::<S>()?;
    for (k, x) in cfg.elements(&phi)?.iter().enumerate() {
        let t = iterate_with_cap(&phi, x, cfg.iterate.n, cfg.iterate.cap)?;
        run.write(&format!("iterate_{k}.jsonl"), &t.to_json_lines())?;
        println!("{x}: depth {} with {} entries", t.depth(), t.len());
    }
    Ok(Outcome::Pass)
}
