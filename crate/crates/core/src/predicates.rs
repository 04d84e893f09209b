//! Exact 2D orientation via a floating-point filter and expansion arithmetic.

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let x = a + b;
    let bv = x - a;
    let av = x - bv;
    (x, (a - av) + (b - bv))
}

#[inline]
fn two_product(a: f64, b: f64) -> (f64, f64) {
    let x = a * b;
    (x, a.mul_add(b, -x))
}

// Adds `b` to a nonoverlapping expansion `e`, dropping zero components.
fn grow_expansion(e: &mut Vec<f64>, b: f64) {
    let mut q = b;
    let mut out = Vec::with_capacity(e.len() + 1);
    for &c in e.iter() {
        let (s, err) = two_sum(q, c);
        if err != 0.0 {
            out.push(err);
        }
        q = s;
    }
    if q != 0.0 {
        out.push(q);
    }
    *e = out;
}

/// `(1 + 16ε)·3ε`, the static error bound of the filtered determinant.
const CCW_ERRBOUND: f64 = (3.0 + 16.0 * f64::EPSILON) * f64::EPSILON;

/// Sign of the determinant `|a-c, b-c|`: positive when `a, b, c` turn left.
pub fn orient2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let left = (a[0] - c[0]) * (b[1] - c[1]);
    let right = (a[1] - c[1]) * (b[0] - c[0]);
    let det = left - right;
    let bound = CCW_ERRBOUND * (left.abs() + right.abs());
    if det > bound || -det > bound {
        return det.signum();
    }
    orient2d_exact(a, b, c)
}

fn orient2d_exact(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    // ax·by − ax·cy − cx·by − ay·bx + ay·cx + cy·bx, each product split exactly.
    let terms = [
        (a[0], b[1]),
        (-a[0], c[1]),
        (-c[0], b[1]),
        (-a[1], b[0]),
        (a[1], c[0]),
        (c[1], b[0]),
    ];
    let mut e: Vec<f64> = Vec::with_capacity(24);
    for (x, y) in terms {
        let (hi, lo) = two_product(x, y);
        grow_expansion(&mut e, lo);
        grow_expansion(&mut e, hi);
    }
    e.last().map_or(0.0, |v| v.signum())
}

fn on_segment_box(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> bool {
    r[0] >= p[0].min(q[0]) && r[0] <= p[0].max(q[0]) && r[1] >= p[1].min(q[1]) && r[1] <= p[1].max(q[1])
}

/// Whether closed segments `p1p2` and `q1q2` share a point, decided exactly.
pub fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let o1 = orient2d(p1, p2, q1);
    let o2 = orient2d(p1, p2, q2);
    let o3 = orient2d(q1, q2, p1);
    let o4 = orient2d(q1, q2, p2);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    (o1 == 0.0 && on_segment_box(p1, p2, q1))
        || (o2 == 0.0 && on_segment_box(p1, p2, q2))
        || (o3 == 0.0 && on_segment_box(q1, q2, p1))
        || (o4 == 0.0 && on_segment_box(q1, q2, p2))
}
