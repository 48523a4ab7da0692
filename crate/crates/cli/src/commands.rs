use std::fs::File;
use std::io::{BufWriter, Write};

use qrdyn::construction::{build_global_map_with_report, BuildConfig, Mode, TranslationReport};
use qrdyn::dynamics::{escape_class, iterate, write_orbit_csv, write_rates_csv, IterateConfig, OrbitMap, ZorichF, ZorichZ};
use qrdyn::example_maps::{Example1, Example2, Example3, FatouH};
use qrdyn::render::{render_slice, write_ppm, Axis, SliceSpec};
use qrdyn::verify::{run_suite, Suite, VerifyConfig};
use qrdyn::{GlobalMap, Vec2, Vec3};

use crate::settings::{ConfigError, Flags, MapKind, Plane, Reals, Settings, Size};
use crate::{Command, EXIT_CONSTRUCTION, EXIT_IO, EXIT_USAGE, EXIT_VERIFY};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn io(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_IO, message: message.into() }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Usage(m) => usage(m),
            ConfigError::Io(m) => io(m),
        }
    }
}

fn build(s: &Settings) -> Result<(GlobalMap, TranslationReport<f64>), Failure> {
    let cfg = BuildConfig { resolution: s.resolution, seed: s.seed, ..BuildConfig::default() };
    build_global_map_with_report(&cfg).map_err(|e| Failure { code: EXIT_CONSTRUCTION, message: e.to_string() })
}

fn output(s: &Settings) -> Result<Box<dyn Write>, Failure> {
    match &s.out {
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| io(format!("{}: {e}", p.display()))),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn write_all(s: &Settings, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), Failure> {
    let mut w = output(s)?;
    body(&mut *w).and_then(|_| w.flush()).map_err(|e| io(e.to_string()))
}

enum Dyn {
    Three(Box<dyn OrbitMap<3>>),
    Two(Box<dyn OrbitMap<2>>),
}

/// The selected map, and the level `L` when the map was built from `f`.
fn select(s: &Settings) -> Result<(Dyn, Option<f64>), Failure> {
    let needs_f = !matches!(s.map, MapKind::UpperF | MapKind::UpperZ | MapKind::Example1 | MapKind::FatouH);
    let f = if needs_f { Some(build(s)?.0) } else { None };
    let level = f.as_ref().map(|f| f.level);
    let gm = || Ok::<_, Failure>(f.clone().expect("built above"));
    let map = match s.map {
        MapKind::LowerF => Dyn::Three(Box::new(gm()?)),
        MapKind::LowerG => Dyn::Three(Box::new(gm()?.with_mode(Mode::G))),
        MapKind::UpperF => Dyn::Three(Box::new(ZorichF)),
        MapKind::UpperZ => Dyn::Three(Box::new(ZorichZ)),
        MapKind::Example1 => Dyn::Two(Box::new(Example1)),
        MapKind::Example2 => Dyn::Three(Box::new(Example2::new(&gm()?))),
        MapKind::Example3 => {
            Dyn::Three(Box::new(Example3::new(&gm()?).map_err(|e| Failure { code: EXIT_CONSTRUCTION, message: e.to_string() })?))
        }
        MapKind::FatouH => Dyn::Two(Box::new(FatouH)),
    };
    Ok((map, level))
}

fn start_point(start: Option<Reals>, dim: usize) -> Result<Vec<f64>, Failure> {
    let v = start.ok_or_else(|| usage("--start is required"))?.0;
    if v.len() != dim || v.iter().any(|x| !x.is_finite()) {
        return Err(usage(format!("--start needs {dim} finite coordinates")));
    }
    Ok(v)
}

pub fn run(command: Command, flags: &Flags) -> Result<(), Failure> {
    let mut s = Settings::resolve(flags, MapKind::LowerF)?;
    match command {
        Command::Constants => {
            let (gm, tr) = build(&s)?;
            let text = qrdyn::report::constants_report(&gm, Some(&tr));
            write_all(&s, |w| w.write_all(text.as_bytes()))
        }
        Command::Verify { suite, samples, pairs } => {
            let suites = if suite.is_empty() {
                match s.extra::<String>(None, "suite")? {
                    Some(list) => list.split(',').map(|t| t.trim().parse::<Suite>()).collect::<Result<Vec<_>, _>>(),
                    None => Ok(Suite::ALL.to_vec()),
                }
            } else {
                suite.iter().map(|t| t.parse::<Suite>()).collect()
            }
            .map_err(usage)?;
            let mut cfg = VerifyConfig { seed: s.seed, tol_seam: s.tol_seam, ..VerifyConfig::default() };
            cfg.samples = s.extra(samples, "samples")?.unwrap_or(cfg.samples);
            cfg.pairs = s.extra(pairs, "pairs")?.unwrap_or(cfg.pairs);
            if cfg.samples == 0 || cfg.pairs == 0 {
                return Err(usage("--samples and --pairs must be positive"));
            }
            let (gm, _) = build(&s)?;
            let mut failed = Vec::new();
            let mut lines = Vec::new();
            for suite in suites {
                let r = run_suite(&gm, suite, &cfg);
                lines.extend(r.lines());
                lines.push(format!("{} {}", suite.name(), if r.pass { "PASS" } else { "FAIL" }));
                if !r.pass {
                    failed.push(suite.name());
                }
            }
            write_all(&s, |w| lines.iter().try_for_each(|l| writeln!(w, "{l}")))?;
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure { code: EXIT_VERIFY, message: format!("failed suites: {}", failed.join(", ")) })
            }
        }
        Command::Render { plane, window, size, threads } => {
            let Plane(axis, value) = s.extra(plane, "plane")?.unwrap_or(Plane(Axis::X2, 0.0));
            let Size(width, height) = s.extra(size, "size")?.unwrap_or(Size(256, 256));
            let threads = s.extra(threads, "threads")?;
            let window = s.extra(window, "window")?;
            if s.map.dim() != 3 {
                return Err(usage("render needs a map of R³"));
            }
            let (Dyn::Three(map), level) = select(&s)? else { unreachable!() };
            // F and Z have no level of their own; 5 is a convenient default height.
            let level = level.unwrap_or(5.0);
            let (horizontal, vertical) = match window {
                Some(Reals(w)) if w.len() == 4 => ((w[0], w[1]), (w[2], w[3])),
                Some(_) => return Err(usage("--window needs four numbers")),
                None => ((-4.0, 4.0), (-2.0, level + 3.0)),
            };
            let spec = SliceSpec { axis, value, horizontal, vertical, width, height, budget: s.budget };
            spec.validate().map_err(|e| usage(e.to_string()))?;
            let cfg = IterateConfig { radius_cap: s.radius_cap, ..IterateConfig::new(s.budget) };
            let classify = |p: &Vec3| escape_class(&iterate(&*map, p, &cfg), s.budget);
            let slice = match threads {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| usage(e.to_string()))?
                    .install(|| render_slice(&spec, classify)),
                None => render_slice(&spec, classify),
            }
            .map_err(|e| usage(e.to_string()))?;
            let path = s.out.clone().unwrap_or_else(|| "slice.ppm".into());
            let file = File::create(&path).map_err(|e| io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write_ppm(&mut w, slice.width, slice.height, &slice.rgb(s.budget))
                .and_then(|_| w.flush())
                .map_err(|e| io(format!("{}: {e}", path.display())))
        }
        Command::Orbit { start } => {
            let start = s.extra(start, "start")?;
            let cfg = IterateConfig { radius_cap: s.radius_cap, ..IterateConfig::new(s.budget).through_entry() };
            match select(&s)?.0 {
                Dyn::Three(map) => {
                    let p = start_point(start, 3)?;
                    let rec = iterate(&*map, &Vec3::new(p[0], p[1], p[2]), &cfg);
                    let class = escape_class(&rec, s.budget).to_string();
                    write_all(&s, |w| write_orbit_csv(w, &rec, &class))
                }
                Dyn::Two(map) => {
                    let p = start_point(start, 2)?;
                    let rec = iterate(&*map, &Vec2::new(p[0], p[1]), &cfg);
                    let class = escape_class(&rec, s.budget).to_string();
                    write_all(&s, |w| write_orbit_csv(w, &rec, &class))
                }
            }
        }
        Command::Rates { start, period } => {
            let start = s.extra(start, "start")?;
            let period = s.extra(period, "period")?.unwrap_or(1);
            if period == 0 {
                return Err(usage("--period must be positive"));
            }
            let cfg = IterateConfig { radius_cap: s.radius_cap, ..IterateConfig::new(s.budget * period).through_entry() };
            let rho = match select(&s)?.0 {
                Dyn::Three(map) => {
                    let p = start_point(start, 3)?;
                    iterate(&*map, &Vec3::new(p[0], p[1], p[2]), &cfg).rho
                }
                Dyn::Two(map) => {
                    let p = start_point(start, 2)?;
                    iterate(&*map, &Vec2::new(p[0], p[1]), &cfg).rho
                }
            };
            write_all(&s, |w| write_rates_csv(w, &rho, period))
        }
    }
}
