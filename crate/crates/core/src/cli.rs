//! Command-line front end. Every subcommand is an [`Experiment`]: its flags are
//! the keys of its configuration, resolved as preset < config file < flags.
//!
//! ```
//! use ridgebound::cli::{command, config_keys, flag_keys};
//! for sub in command().get_subcommands() {
//!     assert_eq!(flag_keys(sub), config_keys(sub.get_name()).unwrap());
//! }
//! ```

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgAction, ArgMatches, Command};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::experiments::{fig1, sim1, sim2, sim3, sweep, tools, Experiment, Manifest, Preset};
use crate::net::fmt17;

const RESERVED: [&str; 5] = ["out", "preset", "config", "jobs", "set"];

macro_rules! for_each_experiment {
    ($mac:ident $(, $arg:expr)*) => {
        $mac!(
            [
                tools::Train,
                tools::Spectrum,
                tools::Admissible,
                tools::Reconstruct,
                tools::Plancherel,
                tools::Bound,
                sim1::Sim1,
                sim2::Sim2,
                sim3::Sim3,
                fig1::Fig1,
                sweep::Sweep
            ]
            $(, $arg)*
        )
    };
}

/// Configuration of `E` under `preset`, as a JSON object.
pub fn defaults<E: Experiment>(preset: Preset) -> Result<Map<String, Value>> {
    match serde_json::to_value(E::preset(preset))? {
        Value::Object(m) => Ok(m),
        other => Err(Error::Config(format!("{} config is not an object: {other}", E::NAME))),
    }
}

fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

fn subcommand<E: Experiment>() -> Command {
    let mut cmd = Command::new(E::NAME).about(E::ABOUT);
    for (key, value) in defaults::<E>(Preset::Desk).expect("presets serialise to objects") {
        let arg = Arg::new(key.clone())
            .long(flag_name(&key))
            .value_name("VALUE")
            .help(format!("default: {value}"));
        let arg = if flag_name(&key) != key { arg.alias(key) } else { arg };
        cmd = cmd.arg(arg);
    }
    cmd.arg(
        Arg::new("out")
            .long("out")
            .value_name("DIR")
            .help(format!("output directory [default: runs/{}]", E::NAME)),
    )
    .arg(
        Arg::new("preset")
            .long("preset")
            .value_name("NAME")
            .default_value("desk")
            .help("built-in preset, desk or full"),
    )
    .arg(
        Arg::new("config")
            .long("config")
            .value_name("FILE")
            .help("flat JSON config or a manifest.json to rerun [default: none]"),
    )
    .arg(
        Arg::new("jobs")
            .long("jobs")
            .value_name("N")
            .help("worker threads [default: RIDGEBOUND_JOBS or the logical core count]"),
    )
    .arg(
        Arg::new("set")
            .long("set")
            .value_name("KEY=VALUE")
            .action(ArgAction::Append)
            .help("override any config key [default: none]"),
    )
}

pub fn command() -> Command {
    macro_rules! build {
        ([$($e:ty),*]) => {
            Command::new("ridgebound")
                .version(crate::experiments::VERSION)
                .about("Random-feature networks, ridgelet spectra and approximation lower bounds")
                .subcommand_required(true)
                .arg_required_else_help(true)
                $(.subcommand(subcommand::<$e>()))*
        };
    }
    for_each_experiment!(build)
}

/// Config keys exposed as flags by a subcommand.
pub fn flag_keys(sub: &Command) -> Vec<String> {
    let mut keys: Vec<String> = sub
        .get_arguments()
        .map(|a| a.get_id().to_string())
        .filter(|id| !RESERVED.contains(&id.as_str()) && id != "help")
        .collect();
    keys.sort();
    keys
}

/// Keys of the configuration a subcommand records in its manifest.
pub fn config_keys(name: &str) -> Result<Vec<String>> {
    macro_rules! find {
        ([$($e:ty),*], $name:expr) => {{
            $(if $name == <$e>::NAME {
                let mut keys: Vec<String> = defaults::<$e>(Preset::Desk)?.keys().cloned().collect();
                keys.sort();
                return Ok(keys);
            })*
            Err(Error::Config(format!("unknown subcommand '{}'", $name)))
        }};
    }
    for_each_experiment!(find, name)
}

/// Reads `text` as the type of `default`; strings are taken verbatim.
fn parse_value(key: &str, text: &str, default: &Value) -> Result<Value> {
    if default.is_string() {
        return Ok(Value::String(text.to_string()));
    }
    if let Ok(v) = serde_json::from_str::<Value>(text) {
        return Ok(v);
    }
    if default.is_array() {
        if let Ok(v) = serde_json::from_str::<Value>(&format!("[{text}]")) {
            return Ok(v);
        }
    }
    if default.is_null() {
        return Ok(Value::String(text.to_string()));
    }
    Err(Error::Config(format!("cannot read '{text}' as a value for {key} (default {default})")))
}

/// A config file: a flat JSON object, or a manifest whose `config` is used.
pub fn read_config_file(path: &Path, experiment: &str) -> Result<Map<String, Value>> {
    let value: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let Value::Object(obj) = value else {
        return Err(Error::Config(format!("{} is not a JSON object", path.display())));
    };
    if let (Some(Value::String(name)), Some(Value::Object(cfg))) = (obj.get("experiment"), obj.get("config")) {
        if name != experiment {
            return Err(Error::Config(format!("{} is a manifest of {name}, not {experiment}", path.display())));
        }
        return Ok(cfg.clone());
    }
    Ok(obj)
}

fn merge(base: &mut Map<String, Value>, layer: Map<String, Value>, origin: &str) -> Result<()> {
    for (k, v) in layer {
        if !base.contains_key(&k) {
            let mut known: Vec<&String> = base.keys().collect();
            known.sort();
            return Err(Error::Config(format!("unknown key '{k}' in {origin}; known keys: {known:?}")));
        }
        base.insert(k, v);
    }
    Ok(())
}

/// Resolves the configuration of `E` from parsed flags.
pub fn resolve<E: Experiment>(m: &ArgMatches) -> Result<E::Config> {
    let preset = Preset::parse(m.get_one::<String>("preset").map(String::as_str).unwrap_or("desk"))?;
    let mut config = defaults::<E>(preset)?;
    let proto = config.clone();
    if let Some(path) = m.get_one::<String>("config") {
        merge(&mut config, read_config_file(Path::new(path), E::NAME)?, path)?;
    }
    let mut flags = Map::new();
    for (key, default) in &proto {
        if let Some(text) = m.get_one::<String>(key) {
            flags.insert(key.clone(), parse_value(key, text, default)?);
        }
    }
    for pair in m.get_many::<String>("set").into_iter().flatten() {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got '{pair}'")))?;
        let k = k.trim().replace('-', "_");
        let default = proto
            .get(&k)
            .ok_or_else(|| Error::Config(format!("unknown key '{k}' in --set")))?;
        flags.insert(k.clone(), parse_value(&k, v, default)?);
    }
    merge(&mut config, flags, "flags")?;
    Ok(serde_json::from_value(Value::Object(config)).map_err(|e| Error::Config(format!("{}: {e}", E::NAME)))?)
}

fn report(m: &Manifest, out: &Path) -> String {
    let mut s = format!("{} wrote {}\n", m.experiment, out.display());
    for t in &m.trials {
        s.push_str(&format!("[{}]\n", t.id));
        for (k, v) in &t.metrics {
            s.push_str(&format!("  {k} = {}\n", fmt17(*v)));
        }
    }
    for (k, st) in &m.aggregate {
        s.push_str(&format!("{k}: mean {} stderr {} n {}\n", fmt17(st.mean), fmt17(st.stderr), st.n));
    }
    s
}

fn run_one<E: Experiment>(m: &ArgMatches) -> Result<String> {
    let config = resolve::<E>(m)?;
    let out = m
        .get_one::<String>("out")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new("runs").join(E::NAME));
    let manifest = E::run(&config, &out)?;
    Ok(report(&manifest, &out))
}

fn jobs(m: &ArgMatches) -> Result<Option<usize>> {
    let text = match m.get_one::<String>("jobs") {
        Some(t) => Some(t.clone()),
        None => std::env::var("RIDGEBOUND_JOBS").ok().filter(|t| !t.trim().is_empty()),
    };
    match text {
        None => Ok(None),
        Some(t) => match t.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("jobs must be a positive integer, got '{t}'"))),
        },
    }
}

/// Outcome of a command line.
pub enum Exit {
    Ok(String),
    Usage(String),
    Failed(Error),
}

impl Exit {
    pub fn code(&self) -> i32 {
        match self {
            Exit::Ok(_) => 0,
            Exit::Usage(_) => 1,
            Exit::Failed(e) if e.is_numerical() => 2,
            Exit::Failed(_) => 1,
        }
    }
}

pub fn run<I, T>(args: I) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() { Exit::Usage(text) } else { Exit::Ok(text) };
        }
    };
    let (name, sub) = matches.subcommand().expect("a subcommand is required");
    let result = (|| {
        if let Some(n) = jobs(sub)? {
            // a second call in the same process keeps the first pool
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        macro_rules! dispatch {
            ([$($e:ty),*], $name:expr) => {{
                $(if $name == <$e>::NAME {
                    return run_one::<$e>(sub);
                })*
                Err(Error::Config(format!("unknown subcommand '{}'", $name)))
            }};
        }
        for_each_experiment!(dispatch, name)
    })();
    match result {
        Ok(text) => Exit::Ok(text),
        Err(e) => Exit::Failed(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_lists_every_key_with_default() {
        let mut cmd = command();
        for sub in cmd.get_subcommands_mut() {
            let help = sub.render_long_help().to_string();
            for key in config_keys(sub.get_name()).unwrap() {
                assert!(help.contains(&format!("--{}", flag_name(&key))), "{} lacks --{key}", sub.get_name());
            }
            assert!(help.matches("default").count() >= config_keys(sub.get_name()).unwrap().len());
        }
    }

    #[test]
    fn values_follow_default_types() {
        assert_eq!(parse_value("a", "-30,30", &serde_json::json!([-1.0, 1.0])).unwrap(), serde_json::json!([-30, 30]));
        assert_eq!(parse_value("t", "sim1:0.05", &serde_json::json!("x")).unwrap(), serde_json::json!("sim1:0.05"));
        assert_eq!(parse_value("k", "3", &Value::Null).unwrap(), serde_json::json!(3));
        assert!(parse_value("w", "ten", &serde_json::json!(10)).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let m = command().try_get_matches_from(["ridgebound", "admissible", "--set", "nope=1"]).unwrap();
        let (_, sub) = m.subcommand().unwrap();
        assert!(matches!(resolve::<tools::Admissible>(sub), Err(Error::Config(_))));
        assert_eq!(run(["ridgebound", "admissible", "--bogus", "1"]).code(), 1);
    }

    #[test]
    fn flags_override_preset() {
        let m = command()
            .try_get_matches_from(["ridgebound", "sim2", "--preset", "full", "--width", "50", "--lambdas", "1,2"])
            .unwrap();
        let (_, sub) = m.subcommand().unwrap();
        let c = resolve::<sim2::Sim2>(sub).unwrap();
        assert_eq!((c.width, c.trials, c.lambdas), (50, 50, vec![1.0, 2.0]));
    }
}
