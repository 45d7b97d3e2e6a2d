//! Text inputs: channel specs, auxiliary cascades and simulation configs,
//! all TOML. Every diagnostic carries `path:line:column`.

use std::ops::Range;
use std::path::{Path, PathBuf};

use secrecy_core::probability::{ConditionalPmf, Pmf};
use secrecy_core::sim::Cardinalities;
use secrecy_core::{AuxiliaryCascade, BroadcastChannel};
use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;

/// Probability rows in input files must sum to one within this.
pub const ROW_TOLERANCE: f64 = 1e-9;

pub struct Source {
    path: PathBuf,
    text: String,
}

impl Source {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: cannot read: {e}", path.display())))?;
        Ok(Source { path: path.to_path_buf(), text })
    }

    #[cfg(test)]
    pub fn from_text(path: &str, text: &str) -> Self {
        Source { path: path.into(), text: text.into() }
    }

    fn line_col(&self, offset: usize) -> (usize, usize) {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }

    fn error_at(&self, span: Option<Range<usize>>, message: impl std::fmt::Display) -> CliError {
        let (line, col) = self.line_col(span.map_or(0, |s| s.start));
        CliError::Input(format!("{}:{line}:{col}: {message}", self.path.display()))
    }

    fn parse<T: for<'de> Deserialize<'de>>(&self) -> Result<T, CliError> {
        toml::from_str(&self.text).map_err(|e| self.error_at(e.span(), e.message().trim_end()))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    alphabet: Alphabet,
    maps: Option<Spanned<Maps>>,
    kernel: Option<Spanned<Kernel>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Alphabet {
    x: Spanned<usize>,
    y1: Spanned<usize>,
    y2: Spanned<usize>,
    z: Spanned<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Maps {
    y1: Spanned<Vec<usize>>,
    y2: Spanned<Vec<usize>>,
    z: Spanned<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Kernel {
    rows: Spanned<Vec<Spanned<Vec<f64>>>>,
}

fn positive(src: &Source, v: &Spanned<usize>, field: &str) -> Result<usize, CliError> {
    match *v.get_ref() {
        0 => Err(src.error_at(Some(v.span()), format!("field `{field}` must be at least 1"))),
        n => Ok(n),
    }
}

/// Checks a row of probabilities and rescales it to sum to one exactly.
fn probability_row(src: &Source, row: &Spanned<Vec<f64>>, field: &str, width: usize) -> Result<Vec<f64>, CliError> {
    let r = row.get_ref();
    let at = |m: String| src.error_at(Some(row.span()), m);
    if r.len() != width {
        return Err(at(format!("field `{field}` has {} entries, expected {width}", r.len())));
    }
    if let Some(bad) = r.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(at(format!("field `{field}` has invalid probability {bad}")));
    }
    let s: f64 = r.iter().sum();
    if (s - 1.0).abs() > ROW_TOLERANCE {
        return Err(at(format!("field `{field}` sums to {s}, not 1 (tolerance {ROW_TOLERANCE:e})")));
    }
    Ok(r.iter().map(|p| p / s).collect())
}

pub fn load_channel(path: &Path) -> Result<BroadcastChannel, CliError> {
    parse_channel(&Source::read(path)?)
}

pub fn parse_channel(src: &Source) -> Result<BroadcastChannel, CliError> {
    let f: ChannelFile = src.parse()?;
    let a = &f.alphabet;
    let cx = positive(src, &a.x, "alphabet.x")?;
    let c1 = positive(src, &a.y1, "alphabet.y1")?;
    let c2 = positive(src, &a.y2, "alphabet.y2")?;
    let cz = positive(src, &a.z, "alphabet.z")?;
    match (&f.maps, &f.kernel) {
        (Some(m), None) => {
            let m = m.get_ref();
            for (name, map, card) in [("maps.y1", &m.y1, c1), ("maps.y2", &m.y2, c2), ("maps.z", &m.z, cz)] {
                let at = |msg: String| src.error_at(Some(map.span()), msg);
                if map.get_ref().len() != cx {
                    return Err(at(format!("field `{name}` has {} entries, expected |X| = {cx}", map.get_ref().len())));
                }
                if let Some(v) = map.get_ref().iter().find(|&&v| v >= card) {
                    return Err(at(format!("field `{name}` maps to {v}, outside the alphabet of size {card}")));
                }
            }
            BroadcastChannel::deterministic(m.y1.get_ref(), m.y2.get_ref(), m.z.get_ref(), (c1, c2, cz))
                .map_err(|e| src.error_at(None, e))
        }
        (None, Some(k)) => {
            let rows = k.get_ref().rows.get_ref();
            if rows.len() != cx {
                return Err(src.error_at(
                    Some(k.get_ref().rows.span()),
                    format!("field `kernel.rows` has {} rows, expected |X| = {cx}", rows.len()),
                ));
            }
            let width = c1 * c2 * cz;
            let dense = rows
                .iter()
                .enumerate()
                .map(|(i, r)| probability_row(src, r, &format!("kernel.rows[{i}]"), width))
                .collect::<Result<Vec<_>, _>>()?;
            let kernel = ConditionalPmf::new(dense).map_err(|e| src.error_at(Some(k.span()), e))?;
            BroadcastChannel::new(cx, c1, c2, cz, kernel).map_err(|e| src.error_at(Some(k.span()), e))
        }
        (Some(_), Some(k)) => {
            Err(src.error_at(Some(k.span()), "give exactly one of `maps` and `kernel`, not both"))
        }
        (None, None) => Err(src.error_at(None, "missing channel: give a `maps` or a `kernel` table")),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CascadeFile {
    v1: Spanned<usize>,
    v2: Spanned<usize>,
    p_u: Spanned<Vec<f64>>,
    p_v_given_u: Spanned<Vec<Spanned<Vec<f64>>>>,
    p_v1v2_given_v: Spanned<Vec<Spanned<Vec<f64>>>>,
    p_x_given_v1v2: Spanned<Vec<Spanned<Vec<f64>>>>,
}

fn conditional(
    src: &Source,
    rows: &Spanned<Vec<Spanned<Vec<f64>>>>,
    field: &str,
    count: usize,
    width: Option<usize>,
) -> Result<ConditionalPmf, CliError> {
    let r = rows.get_ref();
    if r.len() != count {
        return Err(src.error_at(Some(rows.span()), format!("field `{field}` has {} rows, expected {count}", r.len())));
    }
    let width = width.or_else(|| r.first().map(|x| x.get_ref().len())).unwrap_or(0);
    let dense = r
        .iter()
        .enumerate()
        .map(|(i, row)| probability_row(src, row, &format!("{field}[{i}]"), width))
        .collect::<Result<Vec<_>, _>>()?;
    ConditionalPmf::new(dense).map_err(|e| src.error_at(Some(rows.span()), e))
}

pub fn load_cascade(path: &Path, card_x: usize) -> Result<AuxiliaryCascade, CliError> {
    parse_cascade(&Source::read(path)?, card_x)
}

pub fn parse_cascade(src: &Source, card_x: usize) -> Result<AuxiliaryCascade, CliError> {
    let f: CascadeFile = src.parse()?;
    let cv1 = positive(src, &f.v1, "v1")?;
    let cv2 = positive(src, &f.v2, "v2")?;
    let pu = probability_row(src, &f.p_u, "p_u", f.p_u.get_ref().len())?;
    let cu = pu.len();
    let p_v_u = conditional(src, &f.p_v_given_u, "p_v_given_u", cu, None)?;
    let p_w_v = conditional(src, &f.p_v1v2_given_v, "p_v1v2_given_v", p_v_u.out_size(), Some(cv1 * cv2))?;
    let p_x = conditional(src, &f.p_x_given_v1v2, "p_x_given_v1v2", cv1 * cv2, Some(card_x))?;
    let p_u = Pmf::new(pu).map_err(|e| src.error_at(Some(f.p_u.span()), e))?;
    AuxiliaryCascade::new(p_u, p_v_u, p_w_v, (cv1, cv2), p_x).map_err(|e| src.error_at(None, e))
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub eps: Option<f64>,
    pub eps_prime: Option<f64>,
    pub regen_every: Option<usize>,
    pub cardinalities: Option<toml::Table>,
}

/// Loads the simulation config and applies its cardinality table.
pub fn load_sim_config(path: &Path) -> Result<(SimConfig, Cardinalities), CliError> {
    parse_sim_config(&Source::read(path)?)
}

pub fn parse_sim_config(src: &Source) -> Result<(SimConfig, Cardinalities), CliError> {
    let cfg: SimConfig = src.parse()?;
    let mut cards = Cardinalities::default();
    if let Some(t) = &cfg.cardinalities {
        // spans are lost in a plain table; point at the key text instead
        for (k, v) in t {
            let at = |m: String| src.error_at(src.text.find(k.as_str()).map(|s| s..s), m);
            let slot = cards.get_mut(k).ok_or_else(|| {
                at(format!("unknown cardinality `{k}`, expected one of {}", Cardinalities::NAMES.join(", ")))
            })?;
            *slot = match v.as_integer() {
                Some(n) if n >= 1 => n as usize,
                _ => return Err(at(format!("field `cardinalities.{k}` must be a positive integer"))),
            };
        }
    }
    Ok((cfg, cards))
}
