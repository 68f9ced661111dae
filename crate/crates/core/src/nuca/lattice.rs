use std::fmt;
use std::ops::{Add, Neg, Sub};

/// A site of `Z^d`. Ordering is lexicographic on coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub Vec<i64>);

impl Point {
    pub fn origin(d: usize) -> Self {
        Point(vec![0; d])
    }

    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        Point(coords.into())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn norm_inf(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn scale(&self, s: i64) -> Point {
        Point(self.0.iter().map(|c| c * s).collect())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Renders as `(i)` or `(i,j)`, the textual offset key used in spec files.
impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, o: &Point) -> Point {
        debug_assert_eq!(self.dim(), o.dim());
        Point(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, o: &Point) -> Point {
        Point(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point(self.0.iter().map(|a| -a).collect())
    }
}

/// Sorted, deduplicated `A + B`.
pub fn sumset(a: &[Point], b: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
    out.sort();
    out.dedup();
    out
}

/// Sorted, deduplicated `{0} ∪ S ∪ −S`.
pub fn symmetrize(set: &[Point], d: usize) -> Vec<Point> {
    let mut out: Vec<Point> = set.iter().flat_map(|p| [p.clone(), -p]).collect();
    out.push(Point::origin(d));
    out.sort();
    out.dedup();
    out
}

/// All points of the box `[-r, r]^d`, sorted.
pub fn cube(d: usize, r: i64) -> Vec<Point> {
    let mut out = vec![Point(vec![])];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-r..=r).map(move |c| {
                    let mut v = p.0.clone();
                    v.push(c);
                    Point(v)
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sumset_and_symmetrize() {
        let m = vec![Point::new([1])];
        assert_eq!(
            symmetrize(&m, 1),
            vec![Point::new([-1]), Point::new([0]), Point::new([1])]
        );
        let s = sumset(&symmetrize(&m, 1), &symmetrize(&m, 1));
        assert_eq!(s.len(), 5);
        assert_eq!(cube(2, 1).len(), 9);
        assert_eq!(Point::new([1, -2]).to_string(), "(1,-2)");
    }
}
