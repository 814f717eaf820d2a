//! `key = value` run configuration.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::functional::{ProblemConfig, EPS_MAX};
use crate::grid::Domain;
use crate::mountain_pass::default_eps_list;
use crate::riesz::Backend;
use crate::scalar::{NonlinearityModel, SingularFamily, SingularParams};

pub const KEYS: [&str; 20] = [
    "lambda", "mu", "eps", "family", "beta", "q", "k", "r0", "s", "lx", "ly", "nx", "ny", "backend", "eps_list", "tol",
    "path_points", "output_dir", "seed", "max_polish_iterations",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    /// ε sequence of `continue`.
    pub eps_list: Vec<f64>,
    pub tol: f64,
    pub path_points: usize,
    pub max_polish_iterations: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemConfig::reference(),
            eps_list: default_eps_list(),
            tol: 1e-8,
            path_points: 32,
            max_polish_iterations: 20_000,
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

struct Entry {
    line: usize,
    value: String,
}

fn num<T: std::str::FromStr>(entries: &HashMap<&str, Entry>, key: &str, default: T) -> Result<T> {
    match entries.get(key) {
        None => Ok(default),
        Some(e) => e
            .value
            .parse()
            .map_err(|_| Error::config(Some(e.line), format!("cannot parse `{}` as a value for {key}", e.value))),
    }
}

fn line_of(entries: &HashMap<&str, Entry>, key: &str) -> Option<usize> {
    entries.get(key).map(|e| e.line)
}

/// Parses `key = value` lines; `#` starts a comment. Missing keys take the
/// defaults of [`RunConfig::default`].
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: HashMap<&str, Entry> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(Error::config(Some(line), format!("expected `key = value`, got `{body}`")));
        };
        let (k, v) = (k.trim(), v.trim());
        let Some(key) = KEYS.iter().find(|&&x| x == k) else {
            return Err(Error::config(Some(line), format!("unknown key `{k}`")));
        };
        if v.is_empty() {
            return Err(Error::config(Some(line), format!("missing value for {k}")));
        }
        if entries.insert(key, Entry { line, value: v.to_string() }).is_some() {
            return Err(Error::config(Some(line), format!("duplicate key `{k}`")));
        }
    }

    let d = RunConfig::default();
    let r = &d.problem;
    let lambda = num(&entries, "lambda", r.lambda)?;
    let mu = num(&entries, "mu", r.mu)?;
    let eps = num(&entries, "eps", r.eps)?;
    let r0 = num(&entries, "r0", r.model.r0())?;
    let s = num(&entries, "s", r.model.s())?;
    let nx = num(&entries, "nx", r.dom.nx())?;
    let ny = num(&entries, "ny", r.dom.ny())?;
    let lx = num(&entries, "lx", r.dom.lx())?;
    let ly = num(&entries, "ly", r.dom.ly())?;
    let backend: Backend = num(&entries, "backend", r.backend)?;
    let tol = num(&entries, "tol", d.tol)?;
    let path_points = num(&entries, "path_points", d.path_points)?;
    let max_polish_iterations = num(&entries, "max_polish_iterations", d.max_polish_iterations)?;
    let seed = num(&entries, "seed", d.seed)?;
    let output_dir = entries.get("output_dir").map_or(d.output_dir.clone(), |e| PathBuf::from(&e.value));

    let rule = |key: &str, ok: bool, msg: String| -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::config(line_of(&entries, key), msg))
        }
    };
    rule("lambda", lambda >= 0.0 && f64::is_finite(lambda), format!("violates lambda >= 0 (lambda = {lambda})"))?;
    rule("mu", mu > 0.0 && mu < 1.0, format!("violates 0 < mu < 1 (mu = {mu})"))?;
    rule("eps", eps > 0.0 && eps < EPS_MAX, format!("violates 0 < eps < 1/3 (eps = {eps})"))?;
    rule("tol", tol > 0.0 && f64::is_finite(tol), format!("violates tol > 0 (tol = {tol})"))?;
    rule("path_points", path_points >= 16, format!("violates path_points >= 16 (path_points = {path_points})"))?;

    let family = entries.get("family").map_or("power_log", |e| e.value.as_str());
    let singular = match family {
        "power_log" => {
            if let Some(e) = entries.get("k") {
                return Err(Error::config(Some(e.line), "k applies to family = pure_log only"));
            }
            let beta = num(&entries, "beta", r.singular.beta())?;
            let q = num(&entries, "q", r.singular.q())?;
            rule("beta", beta > 0.0 && beta < 1.0, format!("violates 0 < beta < 1 (beta = {beta})"))?;
            rule("q", q > 0.0, format!("violates q > 0 (q = {q})"))?;
            rule("q", q < r0 - 1.0, format!("violates q < r0 - 1 (q = {q}, r0 = {r0})"))?;
            SingularParams::power_log(beta, q).map_err(|e| Error::config(line_of(&entries, "q"), e.to_string()))?
        }
        "pure_log" => {
            for key in ["beta", "q"] {
                if let Some(e) = entries.get(key) {
                    return Err(Error::config(Some(e.line), format!("{key} applies to family = power_log only")));
                }
            }
            let k: u32 = num(&entries, "k", 2)?;
            SingularParams::pure_log(k).map_err(|e| Error::config(line_of(&entries, "k"), e.to_string()))?
        }
        other => {
            return Err(Error::config(
                line_of(&entries, "family"),
                format!("unknown family `{other}` (expected power_log or pure_log)"),
            ))
        }
    };
    let model = NonlinearityModel::new(r0, s)
        .map_err(|e| Error::config(line_of(&entries, "r0").or(line_of(&entries, "s")), e.to_string()))?;
    let dom = Domain::new(lx, ly, nx, ny)
        .map_err(|e| Error::config(line_of(&entries, "nx").or(line_of(&entries, "lx")), e.to_string()))?;

    let eps_list = match entries.get("eps_list") {
        None => d.eps_list,
        Some(e) => {
            let list = e
                .value
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::config(Some(e.line), format!("cannot parse `{}` as a comma-separated list", e.value)))?;
            if let Some(x) = list.iter().find(|&&x| !(x > 0.0 && x < EPS_MAX)) {
                return Err(Error::config(Some(e.line), format!("eps_list violates 0 < eps < 1/3 ({x})")));
            }
            if list.windows(2).any(|w| w[1] >= w[0]) {
                return Err(Error::config(Some(e.line), "eps_list must be strictly decreasing"));
            }
            list
        }
    };

    Ok(RunConfig {
        problem: ProblemConfig {
            lambda,
            mu,
            eps,
            singular,
            model,
            dom,
            backend,
        },
        eps_list,
        tol,
        path_points,
        max_polish_iterations,
        output_dir,
        seed,
    })
}

/// Writes every key; floats use the shortest round-trip representation.
pub fn render(c: &RunConfig) -> String {
    let p = &c.problem;
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("lambda", format!("{:?}", p.lambda));
    kv("mu", format!("{:?}", p.mu));
    kv("eps", format!("{:?}", p.eps));
    match p.singular.family() {
        SingularFamily::PowerLog => {
            kv("family", "power_log".into());
            kv("beta", format!("{:?}", p.singular.beta()));
            kv("q", format!("{:?}", p.singular.q()));
        }
        SingularFamily::PureLog => {
            kv("family", "pure_log".into());
            kv("k", p.singular.k().to_string());
        }
    }
    kv("r0", format!("{:?}", p.model.r0()));
    kv("s", format!("{:?}", p.model.s()));
    kv("lx", format!("{:?}", p.dom.lx()));
    kv("ly", format!("{:?}", p.dom.ly()));
    kv("nx", p.dom.nx().to_string());
    kv("ny", p.dom.ny().to_string());
    kv("backend", p.backend.to_string());
    kv("eps_list", c.eps_list.iter().map(|e| format!("{e:?}")).collect::<Vec<_>>().join(", "));
    kv("tol", format!("{:?}", c.tol));
    kv("path_points", c.path_points.to_string());
    kv("max_polish_iterations", c.max_polish_iterations.to_string());
    kv("output_dir", c.output_dir.display().to_string());
    kv("seed", c.seed.to_string());
    s
}
