//! Reading chains, platforms and solutions named on the command line.

use std::fs;
use std::path::{Path, PathBuf};

use hetpipe::fixtures::{self, Fixture};
use hetpipe::model::SolutionDoc;
use hetpipe::{Error, Platform, Result, Solution, TaskChain};

pub const FIXTURE_DIR_ENV: &str = "HETPIPE_FIXTURES";

pub struct LoadedChain {
    pub chain: TaskChain,
    /// Set when the chain is a bundled receiver profile.
    pub fixture: Option<&'static Fixture>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("{origin} is not a valid {what}: {e}")))
}

/// A path, then `<name>` or `<name>.json` under `$HETPIPE_FIXTURES`, then a
/// bundled profile name.
pub fn chain(arg: &str) -> Result<LoadedChain> {
    let direct = PathBuf::from(arg);
    if direct.is_file() {
        let chain = parse(&read(&direct)?, "chain", arg)?;
        return Ok(LoadedChain { chain, fixture: None });
    }
    if let Some(dir) = std::env::var_os(FIXTURE_DIR_ENV) {
        let dir = PathBuf::from(dir);
        for candidate in [dir.join(arg), dir.join(format!("{arg}.json"))] {
            if candidate.is_file() {
                let chain = parse(&read(&candidate)?, "chain", &candidate.display().to_string())?;
                let fixture = fixtures::fixture(arg).ok();
                return Ok(LoadedChain { chain, fixture });
            }
        }
    }
    match fixtures::fixture(arg) {
        Ok(fx) => Ok(LoadedChain {
            chain: fx.chain(),
            fixture: Some(fx),
        }),
        Err(_) => Err(Error::Input(format!(
            "{arg:?} is neither a chain file nor a bundled profile (see `hetpipe fixtures`)"
        ))),
    }
}

/// A platform JSON file or the `B,L` shorthand.
pub fn platform(arg: &str) -> Result<Platform> {
    let path = PathBuf::from(arg);
    if path.is_file() {
        return parse(&read(&path)?, "platform", arg);
    }
    Platform::parse_counts(arg)
}

pub fn solution_doc(path: &str) -> Result<SolutionDoc> {
    parse(&read(Path::new(path))?, "solution", path)
}

pub fn solution(chain: &TaskChain, path: &str) -> Result<Solution> {
    Solution::from_doc(chain, solution_doc(path)?)
}

/// Comma-separated list of `T`.
pub fn list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::Input(format!("bad {what} {x:?} in {s:?}")))
        })
        .collect()
}

/// `B,L:B,L:...`
pub fn platform_list(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(':')
        .map(|p| Platform::parse_counts(p).map(|p| (p.big, p.little)))
        .collect()
}

pub fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}
