//! Plain-text `key = value` dump of the derived constants and certificates.

use std::fmt::Write;

use crate::construction::{GlobalMap, TranslationReport};
use crate::geometry::StarShape;
use crate::scalar::{Real, V3};
use crate::star_extend::Piece;

fn vec3<T: Real>(v: &V3<T>) -> String {
    format!("({}, {}, {})", v.x, v.y, v.z)
}

fn shape_lines<T: Real>(out: &mut String, key: &str, s: &StarShape<T>) {
    let _ = writeln!(out, "{key}.centre = {}", vec3(&s.centre()));
    if let Some(c) = s.certificate() {
        let _ = writeln!(out, "{key}.theta = {}", c.theta);
        let _ = writeln!(out, "{key}.epsilon = {}", c.epsilon);
    }
}

pub fn constants_report<T: Real>(gm: &GlobalMap<T>, translation: Option<&TranslationReport<T>>) -> String {
    let c = &gm.constants;
    let mut out = String::new();
    let _ = writeln!(out, "c0 = {}", c.c0);
    let _ = writeln!(out, "c0_at = ({}, {})", c.c0_at.x, c.c0_at.y);
    let _ = writeln!(out, "L = {}", c.level);
    let _ = writeln!(out, "exp(L)*c0 = {}", c.expansion_floor);
    let _ = writeln!(out, "K_F = {}", c.k_f);
    let _ = writeln!(out, "jacobian_margin = {}", c.jacobian_margin);
    let _ = writeln!(out, "norm_margin = {}", c.norm_margin);
    let _ = writeln!(out, "beam_resolution = {}", c.resolution);
    let _ = writeln!(out, "beam_samples = {}", c.samples);
    let _ = writeln!(out, "level_retries = {}", c.retries);
    let _ = writeln!(out, "L_prime = {}", gm.l_prime);
    if let Some(t) = translation {
        let _ = writeln!(out, "vertex_max = {}", t.vertex_max);
        let _ = writeln!(out, "vertex_argmax = {}", t.argmax);
        let _ = writeln!(out, "slab_max_minus_L_prime = {}", t.sampled_max);
        let _ = writeln!(out, "slab_samples = {}", t.samples);
    }
    for chart in gm.charts() {
        let key = format!("chart.{}", chart.id);
        shape_lines(&mut out, &format!("{key}.domain"), chart.map.domain());
        shape_lines(&mut out, &format!("{key}.codomain"), chart.map.codomain());
        for (i, piece) in chart.map.boundary().pieces.iter().enumerate() {
            if let Piece::Nested(m) = piece {
                let names = chart.faces[i].iter().map(|n| n.to_string()).collect::<Vec<_>>().join("");
                shape_lines(&mut out, &format!("{key}.face.{names}.domain"), m.domain());
                shape_lines(&mut out, &format!("{key}.face.{names}.codomain"), m.codomain());
            }
        }
    }
    out
}

/// Parses `key = value` lines, skipping blanks and `#` comments.
pub fn parse_key_values(text: &str) -> Vec<(String, String)> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once('=').map(|(k, v)| (k.trim().to_string(), v.trim().to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::global_map;

    #[test]
    fn report_round_trips_through_parser() {
        let gm = global_map();
        let text = constants_report(gm, None);
        let kv = parse_key_values(&text);
        let get = |k: &str| kv.iter().find(|(key, _)| key == k).map(|(_, v)| v.parse::<f64>().unwrap());
        assert_eq!(get("L"), Some(gm.level));
        assert_eq!(get("L_prime"), Some(gm.l_prime));
        assert!(get("exp(L)*c0").unwrap() > 33.0);
        assert!(kv.iter().any(|(k, _)| k == "chart.A'.domain.theta"));
        assert!(kv.iter().filter(|(k, _)| k.ends_with(".epsilon")).count() > 10);
    }

    #[test]
    fn parser_skips_comments() {
        let kv = parse_key_values("# seed\nseed = 7\n\n budget=50 \nnoise");
        assert_eq!(kv, vec![("seed".into(), "7".into()), ("budget".into(), "50".into())]);
    }
}
