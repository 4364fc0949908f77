//! Parametric optima and bicriterion objectives over a closure polygon.
//!
//! For weights `a·λ + b`, the lower set of maximum weight at `λ` is a vertex
//! of the upper hull; sweeping `λ` from `-∞` to `+∞` visits the upper-hull
//! vertices left to right.

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::polygon::{ConvexPolygon, Point};
use crate::witness::Witness;

pub type Rational = Ratio<i128>;

#[derive(Clone, Debug)]
pub struct Piece {
    pub vertex: Point,
    pub witness: Option<Witness>,
}

impl Piece {
    /// `a·λ + b`.
    pub fn value(&self, lambda: Rational) -> Rational {
        lambda * Rational::from_integer(self.vertex.x as i128) + Rational::from_integer(self.vertex.y as i128)
    }
}

/// Piece `i` is optimal on `[breakpoints[i-1], breakpoints[i]]`.
#[derive(Clone, Debug)]
pub struct ParametricProfile {
    pub pieces: Vec<Piece>,
    pub breakpoints: Vec<Rational>,
}

impl ParametricProfile {
    /// Optimal piece at `λ`; at a breakpoint the left piece wins.
    pub fn optimum_at(&self, lambda: Rational) -> &Piece {
        let i = self.breakpoints.partition_point(|&b| b < lambda);
        &self.pieces[i]
    }

    /// Largest weight over all lower sets at `λ`.
    pub fn value_at(&self, lambda: Rational) -> Rational {
        self.optimum_at(lambda).value(lambda)
    }

    /// Interval of piece `i` as `(from, to)`; `None` stands for an infinite end.
    pub fn interval(&self, i: usize) -> (Option<Rational>, Option<Rational>) {
        (i.checked_sub(1).map(|j| self.breakpoints[j]), self.breakpoints.get(i).copied())
    }
}

/// Upper hull left to right, with the breakpoint between each pair.
pub fn parametric_profile(p: &ConvexPolygon) -> Result<ParametricProfile> {
    if p.is_empty() {
        return Err(Error::EmptyPolygon);
    }
    let mut idx = p.upper_chain_indices();
    // a vertical left edge: the lower of its two ends never wins
    if idx.len() >= 2 && p.vertices()[idx[0]].x == p.vertices()[idx[1]].x {
        idx.remove(0);
    }
    let pieces: Vec<Piece> = idx.iter().map(|&i| Piece { vertex: p.vertices()[i], witness: p.witness(i).cloned() }).collect();
    let breakpoints = pieces
        .windows(2)
        .map(|w| {
            let (u, v) = (w[0].vertex, w[1].vertex);
            Rational::new(u.y as i128 - v.y as i128, v.x as i128 - u.x as i128)
        })
        .collect();
    Ok(ParametricProfile { pieces, breakpoints })
}

/// Built-in objectives over `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// `x / y`, undefined where `y = 0`.
    Ratio,
    /// `x² + y²`.
    Dist2,
    /// `a·x + b·y`.
    Linear(i64, i64),
}

impl Objective {
    pub fn eval(&self, v: Point) -> Option<Rational> {
        let (x, y) = (v.x as i128, v.y as i128);
        match *self {
            Objective::Ratio => (y != 0).then(|| Rational::new(x, y)),
            Objective::Dist2 => Some(Rational::from_integer(x * x + y * y)),
            Objective::Linear(a, b) => Some(Rational::from_integer(a as i128 * x + b as i128 * y)),
        }
    }

    /// Parses `ratio`, `dist2` or `linear:a,b`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ratio" => Ok(Objective::Ratio),
            "dist2" => Ok(Objective::Dist2),
            _ => {
                let bad = || Error::Parse(format!("unknown objective `{s}`; expected ratio, dist2 or linear:a,b"));
                let rest = s.strip_prefix("linear:").ok_or_else(bad)?;
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                Ok(Objective::Linear(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Optimum {
    pub vertex: Point,
    pub witness: Option<Witness>,
    pub value: Rational,
}

/// Best vertex under `f`; vertices where `f` is undefined are skipped and
/// ties go to the earlier vertex in canonical order. Exact for quasiconvex `f`.
pub fn maximize_quasiconvex(p: &ConvexPolygon, f: impl Fn(Point) -> Option<Rational>) -> Result<Optimum> {
    if p.is_empty() {
        return Err(Error::EmptyPolygon);
    }
    let mut best: Option<Optimum> = None;
    for (i, &v) in p.vertices().iter().enumerate() {
        let Some(value) = f(v) else {
            log::warn!("objective undefined at vertex {v}; skipped");
            continue;
        };
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(Optimum { vertex: v, witness: p.witness(i).cloned(), value });
        }
    }
    best.ok_or(Error::ObjectiveUndefined)
}

/// Minimum of a quasiconcave `f`, as the maximum of `-f`.
pub fn minimize_quasiconcave(p: &ConvexPolygon, f: impl Fn(Point) -> Option<Rational>) -> Result<Optimum> {
    let mut o = maximize_quasiconvex(p, |v| f(v).map(|x| -x))?;
    o.value = -o.value;
    Ok(o)
}

/// Formats `-inf`, `+inf` or `p/q` (`p` for integers).
pub fn format_rational(r: Option<Rational>, neg_inf: bool) -> String {
    match r {
        None if neg_inf => "-inf".into(),
        None => "+inf".into(),
        Some(r) if r.denom() == &1 => r.numer().to_string(),
        Some(r) => format!("{}/{}", r.numer(), r.denom()),
    }
}

/// Parses `p/q`, `p`, or a finite decimal such as `-1.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a rational number"));
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = frac.len() as u32;
        let scale = 10i128.checked_pow(digits).ok_or_else(bad)?;
        let whole: i128 = if int == "-" || int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let f: i128 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let mag = whole.abs() * scale + f;
        return Ok(Rational::new(if neg { -mag } else { mag }, scale));
    }
    let r: Rational = s.parse().map_err(|_| bad())?;
    if r.denom().is_zero() {
        return Err(bad());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::hull_of_points;
    use crate::poset::{ParamWeight, WeightedPoset, ORACLE_LIMIT};

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn seg() -> ConvexPolygon {
        hull_of_points(&[(Point::ORIGIN, Witness::empty()), (Point::new(1, -1), Witness::single(0))])
    }

    #[test]
    fn profile_examples() {
        let single = ConvexPolygon::point(Point::new(2, 3), Some(Witness::empty()));
        let p = parametric_profile(&single).unwrap();
        assert_eq!(p.pieces.len(), 1);
        assert!(p.breakpoints.is_empty());
        assert_eq!(p.optimum_at(q(-7, 1)).vertex, Point::new(2, 3));

        let p = parametric_profile(&seg()).unwrap();
        assert_eq!(p.breakpoints, vec![q(1, 1)]);
        assert_eq!(p.pieces[0].vertex, Point::ORIGIN);
        assert_eq!(p.pieces[1].witness.as_ref().unwrap().expand(), vec![0]);
        assert_eq!(p.optimum_at(q(0, 1)).vertex, Point::ORIGIN);
        assert_eq!(p.optimum_at(q(1, 1)).vertex, Point::ORIGIN);
        assert_eq!(p.optimum_at(q(2, 1)).vertex, Point::new(1, -1));
        assert!(parametric_profile(&ConvexPolygon::empty()).is_err());
    }

    #[test]
    fn n_poset_profile_matches_brute_force() {
        let p = WeightedPoset::new(
            vec![
                ("a".into(), ParamWeight::new(1, 0)),
                ("b".into(), ParamWeight::new(0, 1)),
                ("c".into(), ParamWeight::new(-1, 3)),
                ("d".into(), ParamWeight::new(2, -1)),
            ],
            &[("a", "c"), ("b", "c"), ("b", "d")],
        )
        .unwrap();
        let poly = p.oracle_polygon(ORACLE_LIMIT).unwrap();
        let prof = parametric_profile(&poly).unwrap();
        let sets = p.enumerate_lower_sets(ORACLE_LIMIT).unwrap();
        let brute = |l: Rational| {
            sets.iter().map(|s| Piece { vertex: p.project(&s.members).unwrap(), witness: None }.value(l)).max().unwrap()
        };
        let mut lambdas: Vec<Rational> = [-10, -1, 0, 1, 10].iter().map(|&x| q(x, 1)).collect();
        lambdas.extend(prof.breakpoints.windows(2).map(|w| (w[0] + w[1]) / 2));
        lambdas.extend(prof.breakpoints.iter().copied());
        for l in lambdas {
            assert_eq!(prof.value_at(l), brute(l), "λ = {l}");
        }
    }

    #[test]
    fn vertical_left_edge_is_trimmed() {
        let sq = crate::polygon::hull_of_plain_points(&[(0, 0), (1, 0), (1, 1), (0, 1)].map(|(x, y)| Point::new(x, y)));
        let p = parametric_profile(&sq).unwrap();
        let vs: Vec<Point> = p.pieces.iter().map(|x| x.vertex).collect();
        assert_eq!(vs, vec![Point::new(0, 1), Point::new(1, 1)]);
        assert_eq!(p.breakpoints, vec![q(0, 1)]);
    }

    #[test]
    fn objective_examples() {
        let sq = crate::polygon::hull_of_plain_points(&[(0, 0), (1, 0), (1, 1), (0, 1)].map(|(x, y)| Point::new(x, y)));
        let o = maximize_quasiconvex(&sq, |v| Objective::Linear(1, 0).eval(v)).unwrap();
        assert_eq!(o.vertex, Point::new(1, 0));
        let tri = crate::polygon::hull_of_plain_points(&[(0, 0), (3, 0), (0, 4)].map(|(x, y)| Point::new(x, y)));
        let o = maximize_quasiconvex(&tri, |v| Objective::Dist2.eval(v)).unwrap();
        assert_eq!((o.vertex, o.value), (Point::new(0, 4), q(16, 1)));
        let o = maximize_quasiconvex(&tri, |v| Objective::Ratio.eval(v)).unwrap();
        assert_eq!(o.vertex, Point::new(0, 4));
        let origin = ConvexPolygon::point(Point::ORIGIN, None);
        assert!(matches!(maximize_quasiconvex(&origin, |v| Objective::Ratio.eval(v)), Err(Error::ObjectiveUndefined)));
        let o = minimize_quasiconcave(&tri, |v| Objective::Linear(-1, -1).eval(v)).unwrap();
        assert_eq!((o.vertex, o.value), (Point::new(0, 4), q(-4, 1)));
    }

    #[test]
    fn parsing() {
        assert_eq!(Objective::parse("linear:2,-3").unwrap(), Objective::Linear(2, -3));
        assert_eq!(Objective::parse("ratio").unwrap(), Objective::Ratio);
        assert!(Objective::parse("linear:2").is_err());
        assert_eq!(parse_rational("3/2").unwrap(), q(3, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(Some(q(3, 2)), false), "3/2");
        assert_eq!(format_rational(None, true), "-inf");
        assert_eq!(format_rational(Some(q(4, 2)), false), "2");
    }
}
