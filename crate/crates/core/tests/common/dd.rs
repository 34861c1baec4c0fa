//! Minimal double-double (~32 significant digits) arithmetic for the
//! high-precision test oracles. Error-free transforms after Dekker/Knuth;
//! products use the hardware FMA through `f64::mul_add`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn new(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> f64 {
        (self.hi + self.lo).abs()
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        quick_two_sum(s, e)
    }

    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        quick_two_sum(p, e)
    }

    pub fn mul_f64(self, v: f64) -> Dd {
        self.mul(Dd::from_f64(v))
    }

    pub fn div_f64(self, v: f64) -> Dd {
        let q1 = self.hi / v;
        // remainder computed exactly: self - q1*v
        let (p, e) = two_prod(q1, v);
        let r_hi = self.hi - p;
        let r = r_hi - e + self.lo;
        let q2 = r / v;
        quick_two_sum(q1, q2)
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    let e = (a - (s - v)) + (b - v);
    (s, e)
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let e = b - (s - a);
    Dd { hi: s, lo: e }
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_recovers_lost_bits() {
        // (1 + 1e-20) - 1 vanishes in f64 but survives in dd
        let one = Dd::from_f64(1.0);
        let tiny = Dd::from_f64(1e-20);
        let sum = one.add(tiny);
        let back = sum.add(one.neg());
        assert!((back.to_f64() - 1e-20).abs() < 1e-35);
    }

    #[test]
    fn dd_mul_and_div() {
        let a = Dd::from_f64(std::f64::consts::PI);
        let b = a.mul(a).div_f64(std::f64::consts::PI);
        assert!((b.to_f64() - std::f64::consts::PI).abs() < 1e-16);
        assert!(b.lo.abs() > 0.0 || b.hi == std::f64::consts::PI);
    }
}
