//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Units are fixed: GHz for frequencies, gaps and rates, mΦ₀ for flux, GHz per
//! mΦ₀ for slopes, kelvin for temperature.
//!
//! | key | required | meaning |
//! |-----|----------|---------|
//! | `slopes.m0` .. `slopes.m3` | yes | signed diabatic slopes (m0, m1 < 0; m2, m3 > 0) |
//! | `locations.x02`, `locations.x12` | one of | Δ₀₂ and Δ₁₂ crossing flux, mirror-symmetric wells |
//! | `intercepts.e0` .. `intercepts.e3` | one of | level energies at zero detuning |
//! | `gaps.d02`, `gaps.d12`, `gaps.d03`, `gaps.d13` | yes | avoided-crossing gaps |
//! | `rates.gamma10`, `rates.gamma20`, `rates.gamma2` | yes | relaxation and dephasing |
//! | `rates.gamma32` | no | left-well relaxation, defaults to `rates.gamma10` |
//! | `drive.omega` | yes | drive frequency |
//! | `temperature` | no | bath temperature, default 0.02 |
//! | `model` | no | `first_diamond` (default), `second_diamond`, `combined` |
//! | `grid.dphi_min` .. `grid.phi_rf_steps` | no | sweep grid, defaults per model |
//! | `output.csv`, `output.pgm` | no | default output paths |

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::qubit::{levels_from_intercepts, levels_from_locations, Gaps, QubitSpec, Relaxation};
use crate::steady_state::Model;
use crate::sweep::{GridSpec, SweepGrid};

pub const DEFAULT_TEMPERATURE: f64 = 0.02;

const KEYS: &[&str] = &[
    "slopes.m0",
    "slopes.m1",
    "slopes.m2",
    "slopes.m3",
    "locations.x02",
    "locations.x12",
    "intercepts.e0",
    "intercepts.e1",
    "intercepts.e2",
    "intercepts.e3",
    "gaps.d02",
    "gaps.d12",
    "gaps.d03",
    "gaps.d13",
    "rates.gamma10",
    "rates.gamma20",
    "rates.gamma32",
    "rates.gamma2",
    "drive.omega",
    "temperature",
    "model",
    "grid.dphi_min",
    "grid.dphi_max",
    "grid.dphi_steps",
    "grid.phi_rf_min",
    "grid.phi_rf_max",
    "grid.phi_rf_steps",
    "output.csv",
    "output.pgm",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub qubit: QubitSpec,
    pub omega: f64,
    pub gamma2: f64,
    pub grid: GridSpec,
    pub model: Model,
    pub output_csv: Option<PathBuf>,
    pub output_pgm: Option<PathBuf>,
}

struct Entries {
    map: HashMap<String, (usize, String)>,
    /// Line after the last one, for errors about missing keys.
    end: usize,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map: HashMap<String, (usize, String)> = HashMap::new();
        let mut end = 1;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            end = line + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(Error::config(line, body, "expected `key = value`"));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::config(line, key, "unknown key"));
            }
            if value.is_empty() {
                return Err(Error::config(line, key, "missing value"));
            }
            if let Some((first, _)) = map.get(key) {
                return Err(Error::config(
                    line,
                    key,
                    format!("duplicate of line {first}"),
                ));
            }
            map.insert(key.to_string(), (line, value.to_string()));
        }
        Ok(Entries { map, end })
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn line_of(&self, key: &str) -> usize {
        self.map.get(key).map_or(self.end, |e| e.0)
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        let Some((line, value)) = self.map.get(key) else {
            return Ok(None);
        };
        let v: f64 = value
            .parse()
            .map_err(|_| Error::config(*line, key, format!("`{value}` is not a number")))?;
        if !v.is_finite() {
            return Err(Error::config(*line, key, "must be finite"));
        }
        Ok(Some(v))
    }

    fn required(&self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| Error::config(self.end, key, "missing required key"))
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        let Some((line, value)) = self.map.get(key) else {
            return Ok(None);
        };
        value
            .parse()
            .map(Some)
            .map_err(|_| Error::config(*line, key, format!("`{value}` is not a node count")))
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|e| e.1.as_str())
    }
}

/// Config key responsible for a parameter named in a validation error.
fn owning_key(name: &str) -> &'static str {
    match name {
        "gamma10" => "rates.gamma10",
        "gamma20" => "rates.gamma20",
        "gamma32" => "rates.gamma32",
        "gamma2" => "rates.gamma2",
        "omega" => "drive.omega",
        "temperature" => "temperature",
        "gap" => "gaps",
        "slope" => "slopes",
        "grid.dphi_steps" => "grid.dphi_steps",
        "grid.phi_rf_steps" => "grid.phi_rf_steps",
        "grid.dphi_max" => "grid.dphi_max",
        "grid.phi_rf_max" => "grid.phi_rf_max",
        "grid.phi_rf_min" => "grid.phi_rf_min",
        _ => "",
    }
}

fn as_config_error(entries: &Entries, err: Error) -> Error {
    match err {
        Error::InvalidParameter { name, reason } => {
            let key = owning_key(name);
            let key = if key.is_empty() { name } else { key };
            Error::config(entries.line_of(key), key, reason)
        }
        Error::DegenerateGeometry { .. } | Error::Domain(_) => {
            Error::config(entries.line_of("slopes.m0"), "slopes", err.to_string())
        }
        other => other,
    }
}

/// Parses config text. Errors name the offending key and line.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let entries = Entries::parse(text)?;
    build(&entries).map_err(|e| as_config_error(&entries, e))
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

fn build(e: &Entries) -> Result<RunConfig> {
    let slopes = [
        e.required("slopes.m0")?,
        e.required("slopes.m1")?,
        e.required("slopes.m2")?,
        e.required("slopes.m3")?,
    ];
    let by_location = e.has("locations.x02") || e.has("locations.x12");
    let by_intercept = (0..4).any(|k| e.has(&format!("intercepts.e{k}")));
    let levels = match (by_location, by_intercept) {
        (true, true) => {
            return Err(Error::config(
                e.line_of("locations.x02").min(e.line_of("locations.x12")),
                "locations",
                "give either crossing locations or intercepts, not both",
            ))
        }
        (false, false) => {
            return Err(Error::config(
                e.end,
                "locations.x02",
                "missing required key (or intercepts.e0..e3)",
            ))
        }
        (true, false) => levels_from_locations(
            slopes,
            e.required("locations.x02")?,
            e.required("locations.x12")?,
        )?,
        (false, true) => levels_from_intercepts(
            slopes,
            [
                e.required("intercepts.e0")?,
                e.required("intercepts.e1")?,
                e.required("intercepts.e2")?,
                e.required("intercepts.e3")?,
            ],
        )?,
    };
    let gaps = Gaps {
        d02: e.required("gaps.d02")?,
        d12: e.required("gaps.d12")?,
        d03: e.required("gaps.d03")?,
        d13: e.required("gaps.d13")?,
    };
    for (key, v) in [
        ("gaps.d02", gaps.d02),
        ("gaps.d12", gaps.d12),
        ("gaps.d03", gaps.d03),
        ("gaps.d13", gaps.d13),
    ] {
        if v < 0.0 {
            return Err(Error::config(
                e.line_of(key),
                key,
                format!("{v} must be ≥ 0"),
            ));
        }
    }
    let gamma10 = e.required("rates.gamma10")?;
    let relaxation = Relaxation {
        gamma10,
        gamma20: e.required("rates.gamma20")?,
        gamma32: e.number("rates.gamma32")?.unwrap_or(gamma10),
        temperature: e.number("temperature")?.unwrap_or(DEFAULT_TEMPERATURE),
    };
    let qubit = QubitSpec::new(levels, gaps, relaxation)?;

    let omega = e.required("drive.omega")?;
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", format!("{omega} must be > 0")));
    }
    let gamma2 = e.required("rates.gamma2")?;
    if !(gamma2 > 0.0) {
        return Err(Error::invalid("gamma2", format!("{gamma2} must be > 0")));
    }

    let model = match e.text("model") {
        None => Model::FirstDiamond,
        Some(s) => s.parse().map_err(|_| {
            Error::config(e.line_of("model"), "model", format!("unknown model `{s}`"))
        })?,
    };
    let d = GridSpec::default_for(model);
    let grid = GridSpec {
        dphi_min: e.number("grid.dphi_min")?.unwrap_or(d.dphi_min),
        dphi_max: e.number("grid.dphi_max")?.unwrap_or(d.dphi_max),
        dphi_steps: e.count("grid.dphi_steps")?.unwrap_or(d.dphi_steps),
        phi_rf_min: e.number("grid.phi_rf_min")?.unwrap_or(d.phi_rf_min),
        phi_rf_max: e.number("grid.phi_rf_max")?.unwrap_or(d.phi_rf_max),
        phi_rf_steps: e.count("grid.phi_rf_steps")?.unwrap_or(d.phi_rf_steps),
    };
    grid.validate()?;

    Ok(RunConfig {
        qubit,
        omega,
        gamma2,
        grid,
        model,
        output_csv: e.text("output.csv").map(PathBuf::from),
        output_pgm: e.text("output.pgm").map(PathBuf::from),
    })
}

impl RunConfig {
    /// The inputs that produced `grid`, without output paths.
    pub fn of_grid(grid: &SweepGrid) -> Self {
        RunConfig {
            qubit: grid.qubit.clone(),
            omega: grid.omega,
            gamma2: grid.gamma2,
            grid: grid.spec,
            model: grid.model,
            output_csv: None,
            output_pgm: None,
        }
    }

    /// Canonical text form: levels as intercepts, every default spelled out.
    /// Parsing it back yields an identical config.
    pub fn to_config_text(&self) -> String {
        let levels = self.qubit.levels();
        let gaps = self.qubit.gaps();
        let r = self.qubit.relaxation();
        let g = &self.grid;
        let mut s = String::new();
        for (k, l) in levels.iter().enumerate() {
            writeln!(s, "slopes.m{k} = {}", l.slope()).unwrap();
        }
        for (k, l) in levels.iter().enumerate() {
            writeln!(s, "intercepts.e{k} = {}", l.intercept()).unwrap();
        }
        writeln!(s, "gaps.d02 = {}", gaps.d02).unwrap();
        writeln!(s, "gaps.d12 = {}", gaps.d12).unwrap();
        writeln!(s, "gaps.d03 = {}", gaps.d03).unwrap();
        writeln!(s, "gaps.d13 = {}", gaps.d13).unwrap();
        writeln!(s, "rates.gamma10 = {}", r.gamma10).unwrap();
        writeln!(s, "rates.gamma20 = {}", r.gamma20).unwrap();
        writeln!(s, "rates.gamma32 = {}", r.gamma32).unwrap();
        writeln!(s, "rates.gamma2 = {}", self.gamma2).unwrap();
        writeln!(s, "drive.omega = {}", self.omega).unwrap();
        writeln!(s, "temperature = {}", r.temperature).unwrap();
        writeln!(s, "model = {}", self.model).unwrap();
        writeln!(s, "grid.dphi_min = {}", g.dphi_min).unwrap();
        writeln!(s, "grid.dphi_max = {}", g.dphi_max).unwrap();
        writeln!(s, "grid.dphi_steps = {}", g.dphi_steps).unwrap();
        writeln!(s, "grid.phi_rf_min = {}", g.phi_rf_min).unwrap();
        writeln!(s, "grid.phi_rf_max = {}", g.phi_rf_max).unwrap();
        writeln!(s, "grid.phi_rf_steps = {}", g.phi_rf_steps).unwrap();
        if let Some(p) = &self.output_csv {
            writeln!(s, "output.csv = {}", p.display()).unwrap();
        }
        if let Some(p) = &self.output_pgm {
            writeln!(s, "output.pgm = {}", p.display()).unwrap();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) const FIG2: &str = "\
# first diamond
slopes.m0 = -1.44
slopes.m1 = -1.09
slopes.m2 = 1.44
slopes.m3 = 1.09
locations.x02 = 0
locations.x12 = 8.4
gaps.d02 = 0.013
gaps.d12 = 0.09
gaps.d03 = 0.1   # not used by the first diamond
gaps.d13 = 0.5
rates.gamma10 = 0.6
rates.gamma20 = 5e-5
rates.gamma2 = 0.05
drive.omega = 0.16
";

    #[test]
    fn loads_minimal_config_with_defaults() {
        let c = parse_config_str(FIG2).unwrap();
        assert_eq!(c.model, Model::FirstDiamond);
        assert_eq!(c.grid, GridSpec::default_for(Model::FirstDiamond));
        assert_eq!(c.qubit.relaxation().gamma32, 0.6);
        assert_eq!(c.qubit.relaxation().temperature, DEFAULT_TEMPERATURE);
        assert!((c.qubit.location(1, 2).unwrap() - 8.4).abs() < 1e-12);
        assert!((c.qubit.location(0, 3).unwrap() + 8.4).abs() < 1e-12);
        assert!((c.qubit.levels()[1].intercept() - 21.252).abs() < 1e-12);
        assert_eq!(c.output_csv, None);
    }

    #[test]
    fn canonical_text_round_trips() {
        let mut c =
            parse_config_str(&format!("{FIG2}model = combined\ngrid.dphi_steps = 11\n")).unwrap();
        c.output_csv = Some("out/m.csv".into());
        let again = parse_config_str(&c.to_config_text()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_config_text(), c.to_config_text());
    }

    #[test]
    fn negative_dephasing_names_the_key() {
        let text = FIG2.replace("rates.gamma2 = 0.05", "rates.gamma2 = -1");
        match parse_config_str(&text) {
            Err(Error::Config { line, key, .. }) => {
                assert_eq!(key, "rates.gamma2");
                assert_eq!(line, 14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_input() {
        let cases = [
            (format!("{FIG2}bogus = 1\n"), "bogus"),
            (format!("{FIG2}drive.omega = 0.2\n"), "drive.omega"),
            (FIG2.replace("gaps.d12 = 0.09\n", ""), "gaps.d12"),
            (FIG2.replace("0.013", "abc"), "gaps.d02"),
            (
                FIG2.replace("slopes.m2 = 1.44", "slopes.m2 = -1.44"),
                "slopes",
            ),
            (format!("{FIG2}intercepts.e0 = 0\n"), "locations"),
            (format!("{FIG2}model = diamond\n"), "model"),
            (format!("{FIG2}grid.dphi_steps = 1\n"), "grid.dphi_steps"),
            (format!("{FIG2}temperature = 0\n"), "temperature"),
            (
                FIG2.replace("rates.gamma20 = 5e-5", "rates.gamma20 = -5e-5"),
                "rates.gamma20",
            ),
            (format!("{FIG2}just words\n"), "just words"),
        ];
        for (text, want) in cases {
            match parse_config_str(&text) {
                Err(Error::Config { key, .. }) => assert_eq!(key, want),
                other => panic!("{want}: {other:?}"),
            }
        }
    }

    #[test]
    fn intercept_form_matches_location_form() {
        let a = parse_config_str(FIG2).unwrap();
        let text = FIG2
            .replace(
                "locations.x02 = 0\n",
                "intercepts.e0 = 0\nintercepts.e2 = 0\n",
            )
            .replace(
                "locations.x12 = 8.4\n",
                "intercepts.e1 = 21.252\nintercepts.e3 = 21.252\n",
            );
        let b = parse_config_str(&text).unwrap();
        for (i, j) in crate::qubit::CROSSING_PAIRS {
            assert!(
                (a.qubit.location(i, j).unwrap() - b.qubit.location(i, j).unwrap()).abs() < 1e-12
            );
        }
    }

    proptest! {
        #[test]
        fn arbitrary_values_round_trip(
            m in prop::array::uniform4(0.1f64..3.0),
            x02 in -5.0f64..5.0,
            x12 in 1.0f64..20.0,
            gap in 0.0f64..1.0,
            omega in 0.01f64..5.0,
            g2 in 1e-4f64..1.0,
            t in 1e-3f64..1.0,
        ) {
            let text = format!(
                "slopes.m0 = {}\nslopes.m1 = {}\nslopes.m2 = {}\nslopes.m3 = {}\n\
                 locations.x02 = {x02}\nlocations.x12 = {x12}\n\
                 gaps.d02 = {gap}\ngaps.d12 = {gap}\ngaps.d03 = {gap}\ngaps.d13 = {gap}\n\
                 rates.gamma10 = 0.6\nrates.gamma20 = 5e-5\nrates.gamma2 = {g2}\n\
                 drive.omega = {omega}\ntemperature = {t}\n",
                -m[0], -m[0] - m[1], m[2], m[2] + m[3],
            );
            let c = parse_config_str(&text).unwrap();
            prop_assert_eq!(parse_config_str(&c.to_config_text()).unwrap(), c);
        }
    }
}
