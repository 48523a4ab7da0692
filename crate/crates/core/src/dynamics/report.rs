use std::io::Write;

use super::orbit::{log_plus, OrbitRecord};

/// Columns `k, x1 … xD, rho, a_k, class`. Coordinates are blank for steps
/// computed in the log domain and `a_k` is blank at `k = 0`.
pub fn write_orbit_csv<W: Write + ?Sized, const D: usize>(w: &mut W, rec: &OrbitRecord<D>, class: &str) -> std::io::Result<()> {
    write!(w, "k")?;
    for i in 1..=D {
        write!(w, ",x{i}")?;
    }
    writeln!(w, ",rho,a_k,class")?;
    for (k, rho) in rec.rho.iter().enumerate() {
        write!(w, "{k}")?;
        match rec.points.get(k) {
            Some(p) => p.iter().try_for_each(|v| write!(w, ",{v:e}"))?,
            None => (0..D).try_for_each(|_| write!(w, ","))?,
        }
        write!(w, ",{rho:e},")?;
        if k > 0 {
            write!(w, "{:e}", log_plus(*rho) / k as f64)?;
        }
        writeln!(w, ",{class}")?;
    }
    Ok(())
}

/// Columns `k, rho, a_k` for a period-`p` series: row `k` holds `ρ_{kp}`.
pub fn write_rates_csv<W: Write + ?Sized>(w: &mut W, rho: &[f64], period: usize) -> std::io::Result<()> {
    writeln!(w, "k,rho,a_k")?;
    for (k, i) in (0..).map(|k| (k, k * period)).take_while(|(_, i)| *i < rho.len()) {
        write!(w, "{k},{:e},", rho[i])?;
        if k > 0 {
            write!(w, "{:e}", log_plus(rho[i]) / k as f64)?;
        }
        writeln!(w)?;
    }
    Ok(())
}
