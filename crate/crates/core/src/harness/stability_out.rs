use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::glm::ImexGlmMethod;
use crate::stability::{constrained_region_area, region_boundary_points, RegionBoundary, RegionKind, StabilityQuery};

use super::output::fmt_f64;
use super::HarnessError;

/// Sector half-angles written to the constrained-region file, widest first
/// so the regions appear from interior toward exterior.
pub const CONSTRAINED_ALPHAS: [f64; 3] = [PI / 2.0, PI / 3.0, PI / 4.0];

/// Paths written by [`emit_stability`].
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityFiles {
    pub implicit: PathBuf,
    pub explicit: PathBuf,
    pub constrained: PathBuf,
    pub area: PathBuf,
}

impl StabilityFiles {
    pub fn all(&self) -> [&Path; 4] {
        [&self.implicit, &self.explicit, &self.constrained, &self.area]
    }
}

fn write_boundary<W: Write>(out: &mut W, alpha: Option<f64>, b: &RegionBoundary) -> std::io::Result<()> {
    for (x, yu, yl) in b.rows() {
        if let Some(a) = alpha {
            write!(out, "{},", fmt_f64(a))?;
        }
        writeln!(out, "{},{},{}", fmt_f64(x), fmt_f64(yu), fmt_f64(yl))?;
    }
    Ok(())
}

/// Writes the boundary of `Shat`, of `S`, of `S_alpha` for each of
/// [`CONSTRAINED_ALPHAS`] and the area report at `q.alpha` into `dir`, named
/// after the method.
pub fn emit_stability(m: &ImexGlmMethod, q: &StabilityQuery, dir: &Path) -> Result<StabilityFiles, HarnessError> {
    q.check()?;
    fs::create_dir_all(dir)?;
    let stem: String = m
        .name()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    let files = StabilityFiles {
        implicit: dir.join(format!("{stem}_implicit.csv")),
        explicit: dir.join(format!("{stem}_explicit.csv")),
        constrained: dir.join(format!("{stem}_constrained.csv")),
        area: dir.join(format!("{stem}_area.json")),
    };

    for (kind, path) in [(RegionKind::Implicit, &files.implicit), (RegionKind::Explicit, &files.explicit)] {
        let b = region_boundary_points(m, kind, q);
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "x,y_upper,y_lower")?;
        write_boundary(&mut out, None, &b)?;
        out.flush()?;
    }

    let mut out = BufWriter::new(File::create(&files.constrained)?);
    writeln!(out, "alpha,x,y_upper,y_lower")?;
    for alpha in CONSTRAINED_ALPHAS {
        let b = region_boundary_points(m, RegionKind::Constrained, &q.clone().with_alpha(alpha));
        write_boundary(&mut out, Some(alpha), &b)?;
    }
    out.flush()?;

    let report = constrained_region_area(m, q);
    let mut out = BufWriter::new(File::create(&files.area)?);
    serde_json::to_writer_pretty(&mut out, &report).map_err(std::io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(files)
}
