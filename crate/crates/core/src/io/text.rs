use super::IoError;
use crate::geometry::{Point, Polygon};

pub const POLYGON_HEADER: &str = "polygon,ccw";

fn parse_rows(text: &str, skip_header: Option<&str>) -> Result<Vec<Point>, IoError> {
    let mut points = Vec::new();
    let mut header_pending = skip_header;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(header) = header_pending.take() {
            if line != header {
                return Err(IoError::Parse {
                    line: line_no,
                    message: format!("expected header '{header}', found '{line}'"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(IoError::Parse {
                line: line_no,
                message: format!("expected 'x,y', found '{line}'"),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| IoError::Parse {
                    line: line_no,
                    message: format!("'{s}' is not a finite number"),
                })
        };
        points.push(Point::new(parse(fields[0])?, parse(fields[1])?));
    }
    if header_pending.is_some() {
        return Err(IoError::Format(format!("missing '{POLYGON_HEADER}' header")));
    }
    Ok(points)
}

/// Points from `x,y` lines. Blank lines and `#` comments are skipped.
pub fn parse_points(text: &str) -> Result<Vec<Point>, IoError> {
    parse_rows(text, None)
}

/// Polygon vertices after a `polygon,ccw` header line.
pub fn parse_polygon(text: &str) -> Result<Vec<Point>, IoError> {
    parse_rows(text, Some(POLYGON_HEADER))
}

pub fn format_points(points: &[Point]) -> String {
    let mut out = String::new();
    for p in points {
        out.push_str(&format!("{},{}\n", p.x, p.y));
    }
    out
}

pub fn format_polygon(poly: &Polygon) -> String {
    format!("{POLYGON_HEADER}\n{}", format_points(poly.vertices()))
}
