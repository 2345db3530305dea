//! Unit-suffixed quantities in configuration values.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Frequency,
    Length,
    Energy,
    Time,
    Temperature,
    Angle,
    Mobility,
    Dimensionless,
}

impl Dimension {
    /// Unit written when dumping a config; values in this unit parse with a
    /// multiplier of exactly one.
    pub fn canonical_unit(self) -> &'static str {
        match self {
            Dimension::Frequency => "Hz",
            Dimension::Length => "m",
            Dimension::Energy => "eV",
            Dimension::Time => "s",
            Dimension::Temperature => "K",
            Dimension::Angle => "deg",
            Dimension::Mobility => "m2/Vs",
            Dimension::Dimensionless => "",
        }
    }

    fn name(self) -> &'static str {
        match self {
            Dimension::Frequency => "frequency",
            Dimension::Length => "length",
            Dimension::Energy => "energy",
            Dimension::Time => "time",
            Dimension::Temperature => "temperature",
            Dimension::Angle => "angle",
            Dimension::Mobility => "mobility",
            Dimension::Dimensionless => "dimensionless",
        }
    }
}

/// Conversion to the canonical unit. Sub-unit prefixes divide by an exact
/// power of ten so that `10 um` is exactly `1e-5 m`.
#[derive(Debug, Clone, Copy)]
enum Scale {
    M(f64),
    D(f64),
}

fn lookup(unit: &str) -> Option<(Dimension, Scale)> {
    use Dimension::*;
    use Scale::{D, M};
    Some(match unit {
        "Hz" => (Frequency, M(1.0)),
        "kHz" => (Frequency, M(1e3)),
        "MHz" => (Frequency, M(1e6)),
        "GHz" => (Frequency, M(1e9)),
        "THz" => (Frequency, M(1e12)),
        "m" => (Length, M(1.0)),
        "mm" => (Length, D(1e3)),
        "um" | "µm" | "μm" => (Length, D(1e6)),
        "nm" => (Length, D(1e9)),
        "eV" => (Energy, M(1.0)),
        "meV" => (Energy, D(1e3)),
        "s" => (Time, M(1.0)),
        "ms" => (Time, D(1e3)),
        "us" | "µs" | "μs" => (Time, D(1e6)),
        "ns" => (Time, D(1e9)),
        "ps" => (Time, D(1e12)),
        "fs" => (Time, D(1e15)),
        "K" => (Temperature, M(1.0)),
        "deg" => (Angle, M(1.0)),
        "rad" => (Angle, M(180.0 / PI)),
        "m2/Vs" => (Mobility, M(1.0)),
        "cm2/Vs" => (Mobility, D(1e4)),
        _ => return None,
    })
}

/// Splits `"2.5 THz"` / `"2.5THz"` into number and unit text.
fn split(text: &str) -> (&str, &str) {
    let text = text.trim();
    let end = text
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit()
                || c == '.'
                || c == '+'
                || c == '-'
                || ((c == 'e' || c == 'E')
                    && text[i + 1..]
                        .starts_with(|n: char| n.is_ascii_digit() || n == '-' || n == '+')))
        })
        .map_or(text.len(), |(i, _)| i);
    (text[..end].trim(), text[end..].trim())
}

/// Parses a single quantity of the expected dimension into its canonical unit.
/// Dimensional quantities must carry a unit; dimensionless ones must not.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, String> {
    parse_with_default_unit(text, dim, None)
}

fn parse_with_default_unit(
    text: &str,
    dim: Dimension,
    default_unit: Option<&str>,
) -> Result<f64, String> {
    let (number, unit) = split(text);
    let value: f64 = number
        .parse()
        .map_err(|_| format!("`{}` is not a number", text.trim()))?;
    if !value.is_finite() {
        return Err(format!("`{}` is not finite", text.trim()));
    }
    let unit = if unit.is_empty() {
        default_unit.unwrap_or("")
    } else {
        unit
    };
    if dim == Dimension::Dimensionless {
        return if unit.is_empty() {
            Ok(value)
        } else {
            Err(format!(
                "unit mismatch: expected a dimensionless number, found unit `{unit}`"
            ))
        };
    }
    if unit.is_empty() {
        return Err(format!(
            "missing unit: expected a {} such as `{} {}`",
            dim.name(),
            number,
            dim.canonical_unit()
        ));
    }
    match lookup(unit) {
        Some((d, Scale::M(m))) if d == dim => Ok(if m == 1.0 { value } else { value * m }),
        Some((d, Scale::D(q))) if d == dim => Ok(value / q),
        Some((d, _)) => Err(format!(
            "unit mismatch: `{unit}` is a {} unit, expected a {}",
            d.name(),
            dim.name()
        )),
        None => Err(format!("unknown unit `{unit}`")),
    }
}

/// Comma-separated list. Items without a unit take the unit of the last item,
/// so `0, 10, 20 deg` and `0 deg, 10 deg, 20 deg` are equivalent.
pub fn parse_list(text: &str, dim: Dimension) -> Result<Vec<f64>, String> {
    let items: Vec<&str> = text.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err("empty list item".to_string());
    }
    let trailing = items.last().map(|s| split(s).1).filter(|u| !u.is_empty());
    items
        .iter()
        .map(|item| parse_with_default_unit(item, dim, trailing))
        .collect()
}

/// Shortest round-trip representation followed by the canonical unit.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    let unit = dim.canonical_unit();
    if unit.is_empty() {
        format!("{value:?}")
    } else {
        format!("{value:?} {unit}")
    }
}

pub fn format_list(values: &[f64], dim: Dimension) -> String {
    values
        .iter()
        .map(|v| format_quantity(*v, dim))
        .collect::<Vec<_>>()
        .join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_equivalence() {
        assert_eq!(
            parse_quantity("2.5 THz", Dimension::Frequency).unwrap(),
            parse_quantity("2.5e12 Hz", Dimension::Frequency).unwrap()
        );
        assert_eq!(
            parse_quantity("2.5THz", Dimension::Frequency).unwrap(),
            2.5e12
        );
        assert_eq!(parse_quantity("0.1 ps", Dimension::Time).unwrap(), 0.1e-12);
        assert_eq!(parse_quantity("10 um", Dimension::Length).unwrap(), 1e-5);
        assert_eq!(
            parse_quantity("9.23 µm", Dimension::Length).unwrap(),
            9.23e-6
        );
        assert_eq!(
            parse_quantity("2000 cm2/Vs", Dimension::Mobility).unwrap(),
            0.2
        );
        assert_eq!(parse_quantity("500 meV", Dimension::Energy).unwrap(), 0.5);
        assert!(
            (parse_quantity("1 rad", Dimension::Angle).unwrap() - 57.295_779_513_082_32).abs()
                < 1e-12
        );
        assert_eq!(
            parse_quantity("-1e-3 eV", Dimension::Energy).unwrap(),
            -1e-3
        );
    }

    #[test]
    fn mismatches_and_missing_units() {
        assert!(parse_quantity("2.5 eV", Dimension::Frequency)
            .unwrap_err()
            .contains("unit mismatch"));
        assert!(parse_quantity("2.5", Dimension::Frequency)
            .unwrap_err()
            .contains("missing unit"));
        assert!(parse_quantity("2.5 furlongs", Dimension::Length)
            .unwrap_err()
            .contains("unknown unit"));
        assert!(parse_quantity("11.9 m", Dimension::Dimensionless).is_err());
        assert!(parse_quantity("abc THz", Dimension::Frequency).is_err());
        assert!(parse_quantity("inf THz", Dimension::Frequency).is_err());
    }

    #[test]
    fn lists_share_trailing_unit() {
        assert_eq!(
            parse_list("0, 10, 20 deg", Dimension::Angle).unwrap(),
            parse_list("0 deg, 10 deg, 20 deg", Dimension::Angle).unwrap()
        );
        assert_eq!(
            parse_list("0.5, 0.6 eV", Dimension::Energy).unwrap(),
            vec![0.5, 0.6]
        );
        assert!(parse_list("0.5, , 0.6 eV", Dimension::Energy).is_err());
    }

    #[test]
    fn formatted_values_reparse_exactly() {
        for v in [
            2.5e12,
            1e-13,
            9.224_383_323_076_922e-6,
            0.1 + 0.2,
            57.295_779_513_082_32,
        ] {
            for dim in [
                Dimension::Frequency,
                Dimension::Length,
                Dimension::Angle,
                Dimension::Dimensionless,
            ] {
                assert_eq!(parse_quantity(&format_quantity(v, dim), dim).unwrap(), v);
            }
        }
    }
}
