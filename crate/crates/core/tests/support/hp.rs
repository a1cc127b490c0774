//! Binary fixed-point arithmetic on BigInt, enough to sum Mittag-Leffler
//! series with parameters on the quarter lattice exactly up to 2^-PREC.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const PREC: u64 = 1800;

#[derive(Clone, Debug)]
pub struct Fx(pub BigInt);

impl Fx {
    pub fn from_int(v: i64) -> Fx {
        Fx(BigInt::from(v) << PREC)
    }
    pub fn mul(&self, o: &Fx) -> Fx {
        Fx((&self.0 * &o.0) >> PREC)
    }
    pub fn div(&self, o: &Fx) -> Fx {
        Fx((&self.0 << PREC) / &o.0)
    }
    pub fn mul_int(&self, v: i64) -> Fx {
        Fx(&self.0 * BigInt::from(v))
    }
    pub fn div_int(&self, v: i64) -> Fx {
        Fx(&self.0 / BigInt::from(v))
    }
    pub fn add(&self, o: &Fx) -> Fx {
        Fx(&self.0 + &o.0)
    }
    pub fn sub(&self, o: &Fx) -> Fx {
        Fx(&self.0 - &o.0)
    }
    pub fn sqrt(&self) -> Fx {
        Fx((&self.0 << PREC).sqrt())
    }
    pub fn is_negligible(&self) -> bool {
        self.0.bits() < 8
    }
    pub fn to_f64(&self) -> f64 {
        let shift = PREC.saturating_sub(100);
        let top = &self.0 >> shift;
        let mant = top.to_f64().unwrap();
        mant * 2f64.powi(-((PREC - shift) as i32))
    }
    pub fn abs_bits(&self) -> u64 {
        self.0.abs().bits()
    }
}

fn atan_inv(n: i64) -> Fx {
    // atan(1/n) = Σ (-1)^k / ((2k+1) n^{2k+1})
    let mut power = Fx::from_int(1).div_int(n);
    let n2 = n * n;
    let mut sum = Fx(BigInt::zero());
    let mut k = 0i64;
    while !power.0.is_zero() {
        let term = power.div_int(2 * k + 1);
        sum = if k % 2 == 0 { sum.add(&term) } else { sum.sub(&term) };
        power = power.div_int(n2);
        k += 1;
    }
    sum
}

pub fn pi() -> Fx {
    atan_inv(5).mul_int(16).sub(&atan_inv(239).mul_int(4))
}

fn agm(a: Fx, b: Fx) -> Fx {
    let (mut a, mut b) = (a, b);
    for _ in 0..64 {
        let an = Fx((&a.0 + &b.0) >> 1);
        let bn = a.mul(&b).sqrt();
        let done = (&an.0 - &bn.0).abs() <= BigInt::one() << 4;
        a = an;
        b = bn;
        if done {
            break;
        }
    }
    a
}

/// Γ(1/4), Γ(1/2), Γ(3/4), Γ(1).
pub fn quarter_gammas() -> [Fx; 4] {
    let pi = pi();
    let two = Fx::from_int(2);
    let sqrt2 = two.sqrt();
    let two_pi = pi.mul_int(2);
    let m = agm(Fx::from_int(1), sqrt2.clone());
    let g14 = two_pi.mul(&two_pi.sqrt()).div(&m).sqrt();
    let g12 = pi.sqrt();
    let g34 = pi.mul(&sqrt2).div(&g14);
    [g14, g12, g34, Fx::from_int(1)]
}

/// E_{a/4, b/4}(p/q) by exact fixed-point summation of the defining series.
/// Terms are advanced four at a time within each residue class so no
/// intermediate quantity leaves the representable range:
/// t_{k+4} = t_k (p/q)^4 4^a / Π_{i<a} (j + 4i), with j = a k + b.
pub fn ml_quarter(a: u32, b: u32, p: i64, q: i64) -> f64 {
    assert!(a >= 1 && b >= 1 && q > 0);
    let g = quarter_gammas();
    let inv_gamma_small = |j: u64| -> Fx {
        // 1/Γ(j/4) for small j by downward products onto Γ(r/4)
        let mut r = j;
        let mut den = Fx::from_int(1);
        while r > 4 {
            r -= 4;
            den = den.mul_int(r as i64).div_int(4);
        }
        Fx::from_int(1).div(&den.mul(&g[(r - 1) as usize]))
    };
    let mut last: Vec<Fx> = Vec::new();
    let mut zk = Fx::from_int(1);
    for k in 0..4u64 {
        last.push(zk.mul(&inv_gamma_small(a as u64 * k + b as u64)));
        zk = zk.mul_int(p).div_int(q);
    }
    let mut sum = Fx(BigInt::zero());
    for t in &last {
        sum = sum.add(t);
    }
    let mut k: u64 = 4;
    let mut small_run = 0;
    loop {
        let prev = &last[(k % 4) as usize];
        let j_prev = a as u64 * (k - 4) + b as u64;
        let mut t = prev.mul_int(p.pow(4)).mul_int(4i64.pow(a));
        for i in 0..a as u64 {
            t = t.div_int((j_prev + 4 * i) as i64);
        }
        t = t.div_int(q.pow(4));
        sum = sum.add(&t);
        if t.abs_bits() < 16 {
            small_run += 1;
            if small_run > 8 {
                break;
            }
        } else {
            small_run = 0;
        }
        last[(k % 4) as usize] = t;
        k += 1;
        assert!(k < 400_000, "oracle series did not converge");
    }
    sum.to_f64()
}

#[cfg(test)]
mod tests {}
