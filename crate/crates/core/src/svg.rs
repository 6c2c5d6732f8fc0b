//! SVG rendering of probability maps and beta-hulls. Presentation only:
//! coordinates round to binary64 for drawing, no numeric claims flow
//! through here.

use crate::geom::point::Point;
use crate::geom::polygon::ConvexRegion;
use crate::model::UncertainPointSet;
use crate::probmap::ProbabilityMap;
use crate::scalar::{rat_to_f64, Rat};

struct Frame {
    min_x: f64,
    min_y: f64,
    scale: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>, target: f64) -> Frame {
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        let mut any = false;
        for (x, y) in points {
            any = true;
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
        if !any {
            return Frame {
                min_x: -1.0,
                min_y: -1.0,
                scale: target / 2.0,
                width: target,
                height: target,
            };
        }
        let pad = ((max_x - min_x).max(max_y - min_y) * 0.08).max(1.0);
        let (min_x, max_x) = (min_x - pad, max_x + pad);
        let (min_y, max_y) = (min_y - pad, max_y + pad);
        let scale = target / (max_x - min_x).max(max_y - min_y);
        Frame {
            min_x,
            min_y,
            scale,
            width: (max_x - min_x) * scale,
            height: (max_y - min_y) * scale,
        }
    }

    fn tx(&self, p: &Point) -> (f64, f64) {
        let x = (rat_to_f64(p.x()) - self.min_x) * self.scale;
        // Flip y so the picture is in the usual orientation.
        let y = self.height - (rat_to_f64(p.y()) - self.min_y) * self.scale;
        (x, y)
    }
}

fn header(frame: &Frame) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" \
         viewBox=\"0 0 {:.2} {:.2}\">\n",
        frame.width, frame.height, frame.width, frame.height
    )
}

/// The arrangement with bounded faces shaded by membership probability.
pub fn probability_map_svg(map: &ProbabilityMap) -> String {
    let face_polys = map.bounded_face_polygons();
    let frame = Frame::fit(
        map.site_points()
            .iter()
            .chain(face_polys.iter().flat_map(|(_, poly)| poly.iter()))
            .map(|p| (rat_to_f64(p.x()), rat_to_f64(p.y()))),
        800.0,
    );
    let mut out = header(&frame);
    for (face, poly) in &face_polys {
        let prob = rat_to_f64(map.face_probability(*face));
        let pts: Vec<String> = poly
            .iter()
            .map(|p| {
                let (x, y) = frame.tx(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        out.push_str(&format!(
            "  <polygon points=\"{}\" fill=\"rgb(30,90,200)\" fill-opacity=\"{:.4}\" \
             stroke=\"none\"><title>face {} p={:.6}</title></polygon>\n",
            pts.join(" "),
            prob,
            face,
            prob
        ));
    }
    // Pair lines clipped to the frame by drawing across the full x-range.
    let x_lo = Rat::from_integer((frame.min_x.floor() as i64).into());
    let x_hi = Rat::from_integer(((frame.min_x + frame.width / frame.scale).ceil() as i64).into());
    for line in map.lines() {
        let a = Point::new(vec![x_lo.clone(), line.y_at(&x_lo)]);
        let b = Point::new(vec![x_hi.clone(), line.y_at(&x_hi)]);
        let (x1, y1) = frame.tx(&a);
        let (x2, y2) = frame.tx(&b);
        out.push_str(&format!(
            "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" \
             stroke=\"#99a\" stroke-width=\"0.6\"/>\n"
        ));
    }
    for p in map.site_points() {
        let (x, y) = frame.tx(p);
        out.push_str(&format!(
            "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"#c22\"/>\n"
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// The sites with the beta-hull region overlaid.
pub fn beta_hull_svg(model: &UncertainPointSet, region: &ConvexRegion) -> String {
    let sites = model.all_points();
    let frame = Frame::fit(
        sites
            .iter()
            .chain(region.vertices().iter())
            .map(|p| (rat_to_f64(p.x()), rat_to_f64(p.y()))),
        800.0,
    );
    let mut out = header(&frame);
    match region {
        ConvexRegion::Polygon(verts) => {
            let pts: Vec<String> = verts
                .iter()
                .map(|p| {
                    let (x, y) = frame.tx(p);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            out.push_str(&format!(
                "  <polygon points=\"{}\" fill=\"rgb(40,160,90)\" fill-opacity=\"0.35\" \
                 stroke=\"rgb(20,110,60)\" stroke-width=\"1.5\"/>\n",
                pts.join(" ")
            ));
        }
        ConvexRegion::Segment(a, b) => {
            let (x1, y1) = frame.tx(a);
            let (x2, y2) = frame.tx(b);
            out.push_str(&format!(
                "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" \
                 stroke=\"rgb(20,110,60)\" stroke-width=\"2\"/>\n"
            ));
        }
        ConvexRegion::Point(p) => {
            let (x, y) = frame.tx(p);
            out.push_str(&format!(
                "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"rgb(20,110,60)\"/>\n"
            ));
        }
        _ => {}
    }
    for (gi, g) in model.groups.iter().enumerate() {
        for s in &g.sites {
            let (x, y) = frame.tx(&s.point);
            out.push_str(&format!(
                "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"hsl({}, 70%, 45%)\">\
                 <title>group {gi} p={}</title></circle>\n",
                (gi * 67) % 360,
                crate::scalar::format_rat(&s.prob)
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::beta_hull_2d;
    use crate::probmap::build_probability_map;
    use crate::scalar::parse_decimal;

    #[test]
    fn map_svg_is_well_formed_with_one_polygon_per_bounded_face() {
        let m = UncertainPointSet::unipoint(
            2,
            vec![
                (Point::from_i64(&[0, 10]), parse_decimal("0.5").unwrap()),
                (Point::from_i64(&[-10, -5]), parse_decimal("0.5").unwrap()),
                (Point::from_i64(&[10, -5]), parse_decimal("0.5").unwrap()),
            ],
        );
        let map = build_probability_map(&m).unwrap();
        let svg = probability_map_svg(&map);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        let polys = svg.matches("<polygon").count();
        assert_eq!(polys, 1); // the triangle face
        assert_eq!(svg.matches("<line").count(), 3);
    }

    #[test]
    fn beta_svg_draws_hull_and_sites() {
        use crate::model::{Group, ModelKind, Site};
        let g = |pts: &[([i64; 2], &str)]| Group {
            sites: pts
                .iter()
                .map(|(pt, pr)| Site {
                    point: Point::from_i64(pt),
                    prob: parse_decimal(pr).unwrap(),
                })
                .collect(),
        };
        let m = UncertainPointSet::new(
            2,
            ModelKind::Multipoint,
            vec![
                g(&[([0, 9], "1")]),
                g(&[([-8, -3], "1")]),
                g(&[([9, -4], "1")]),
            ],
        );
        let hull = beta_hull_2d(&m, &Rat::new(1.into(), 1.into())).unwrap();
        let svg = beta_hull_svg(&m, &hull.region);
        assert!(svg.contains("<polygon"));
        assert_eq!(svg.matches("<circle").count(), 3);
    }
}
