//! Canonical text forms and parsers for field elements, polynomials,
//! rational functions, curve functions, points, divisors, and curves.
//! Every `*_to_string` here round-trips through the matching parser.

use crate::curve::{CurvePoint, EllipticCurve};
use crate::divisor::Divisor;
use crate::error::ParseError;
use crate::field::Fp;
use crate::function::CurveFunction;
use crate::poly::Poly;
use crate::ratfn::RatFn;

pub fn poly_to_string(q: &Poly) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let deg = q.degree().as_usize().expect("nonzero polynomial has finite degree");
    let mut parts = Vec::new();
    for k in (0..=deg).rev() {
        let c = q.coeff(k);
        if c.is_zero() {
            continue;
        }
        let is_one = c.value() == 1;
        let term = match k {
            0 => format!("{c}"),
            1 if is_one => "x".to_string(),
            1 => format!("{c}*x"),
            _ if is_one => format!("x^{k}"),
            _ => format!("{c}*x^{k}"),
        };
        parts.push(term);
    }
    parts.join(" + ")
}

pub fn ratfn_to_string(f: &RatFn) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    if f.den().is_one() {
        poly_to_string(f.num())
    } else {
        format!("({})/({})", poly_to_string(f.num()), poly_to_string(f.den()))
    }
}

pub fn curvefn_to_string(f: &CurveFunction) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let a = f.a_part();
    let b = f.b_part();
    if b.is_zero() {
        return ratfn_to_string(a);
    }
    let bs = if *b == RatFn::one(b.modulus()) {
        "y".to_string()
    } else {
        format!("({})*y", ratfn_to_string(b))
    };
    if a.is_zero() {
        bs
    } else {
        format!("{} + {}", ratfn_to_string(a), bs)
    }
}

/// a + b*y value threaded through the expression parser.
#[derive(Clone)]
struct Pair {
    a: RatFn,
    b: RatFn,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    p: u64,
    /// x^3 + a*x + b for reducing y^2; None forbids y entirely.
    rhs: Option<RatFn>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, p: u64, rhs: Option<RatFn>) -> Self {
        Parser { src: src.as_bytes(), pos: 0, p, rhs }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expect(&mut self, want: u8) -> Result<(), ParseError> {
        match self.bump() {
            Some(c) if c == want => Ok(()),
            other => Err(ParseError::Syntax(format!(
                "expected '{}', found {:?}",
                want as char,
                other.map(|c| c as char)
            ))),
        }
    }

    fn parse_uint(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(ParseError::Syntax("expected a number".to_string()));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| ParseError::Syntax("number too large".to_string()))
    }

    fn zero_pair(&self) -> Pair {
        Pair { a: RatFn::zero(self.p), b: RatFn::zero(self.p) }
    }

    fn add(&self, l: &Pair, r: &Pair) -> Pair {
        Pair { a: &l.a + &r.a, b: &l.b + &r.b }
    }

    fn sub(&self, l: &Pair, r: &Pair) -> Pair {
        Pair { a: &l.a - &r.a, b: &l.b - &r.b }
    }

    fn neg(&self, v: &Pair) -> Pair {
        Pair { a: -&v.a, b: -&v.b }
    }

    fn mul(&self, l: &Pair, r: &Pair) -> Pair {
        let mut a = &l.a * &r.a;
        if !l.b.is_zero() && !r.b.is_zero() {
            let c = self.rhs.as_ref().expect("y parsed without a curve");
            a = &a + &(&(&l.b * &r.b) * c);
        }
        let b = &(&l.a * &r.b) + &(&l.b * &r.a);
        Pair { a, b }
    }

    fn div(&self, l: &Pair, r: &Pair) -> Result<Pair, ParseError> {
        if r.a.is_zero() && r.b.is_zero() {
            return Err(ParseError::Syntax("division by zero".to_string()));
        }
        if r.b.is_zero() {
            return Ok(Pair { a: &l.a / &r.a, b: &l.b / &r.a });
        }
        let c = self.rhs.as_ref().expect("y parsed without a curve");
        let n = &(&r.a * &r.a) - &(&(&r.b * &r.b) * c);
        if n.is_zero() {
            return Err(ParseError::Syntax("division by zero".to_string()));
        }
        let inv = Pair { a: &r.a / &n, b: &(-&r.b) / &n };
        Ok(self.mul(l, &inv))
    }

    fn parse_expr(&mut self) -> Result<Pair, ParseError> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.parse_term()?;
                    acc = self.add(&acc, &t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.parse_term()?;
                    acc = self.sub(&acc, &t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Pair, ParseError> {
        let mut acc = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.parse_factor()?;
                    acc = self.mul(&acc, &f);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let f = self.parse_factor()?;
                    acc = self.div(&acc, &f)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Pair, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let f = self.parse_factor()?;
            return Ok(self.neg(&f));
        }
        let base = self.parse_atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.parse_uint()?;
            if e > 4096 {
                return Err(ParseError::Syntax(format!("exponent {e} too large")));
            }
            let mut acc = Pair { a: RatFn::one(self.p), b: RatFn::zero(self.p) };
            for _ in 0..e {
                acc = self.mul(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Pair, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.parse_expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                Ok(Pair { a: RatFn::x(self.p), b: RatFn::zero(self.p) })
            }
            Some(b'y') => {
                self.pos += 1;
                if self.rhs.is_none() {
                    return Err(ParseError::Syntax(
                        "y is not allowed here (no curve in scope)".to_string(),
                    ));
                }
                Ok(Pair { a: RatFn::zero(self.p), b: RatFn::one(self.p) })
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.parse_uint()?;
                let mut pr = self.zero_pair();
                pr.a = RatFn::constant(Fp::from_u64(n % self.p, self.p));
                Ok(pr)
            }
            other => Err(ParseError::Syntax(format!(
                "unexpected {:?}",
                other.map(|c| c as char)
            ))),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(ParseError::Syntax(format!(
                "unexpected trailing input at byte {}",
                self.pos
            )));
        }
        Ok(())
    }
}

/// Parses an expression in x and y into a function on the curve.
pub fn parse_curvefn(s: &str, curve: &EllipticCurve) -> Result<CurveFunction, ParseError> {
    let rhs = RatFn::from_poly(curve.rhs_poly());
    let mut parser = Parser::new(s, curve.modulus(), Some(rhs));
    let pair = parser.parse_expr()?;
    parser.finish()?;
    Ok(CurveFunction::new(*curve, pair.a, pair.b))
}

/// Parses an expression in x alone into a rational function over F_p.
pub fn parse_ratfn(s: &str, p: u64) -> Result<RatFn, ParseError> {
    let mut parser = Parser::new(s, p, None);
    let pair = parser.parse_expr()?;
    parser.finish()?;
    Ok(pair.a)
}

fn parse_int(parser: &mut Parser) -> Result<i64, ParseError> {
    let neg = parser.peek() == Some(b'-');
    if neg {
        parser.pos += 1;
    }
    let n = parser.parse_uint()?;
    let n = i64::try_from(n).map_err(|_| ParseError::Syntax("number too large".to_string()))?;
    Ok(if neg { -n } else { n })
}

fn parse_point_inner(parser: &mut Parser, curve: &EllipticCurve) -> Result<CurvePoint, ParseError> {
    match parser.peek() {
        Some(b'O') => {
            parser.pos += 1;
            Ok(CurvePoint::Infinity)
        }
        Some(b'(') => {
            parser.pos += 1;
            let x = parse_int(parser)?;
            parser.expect(b',')?;
            let y = parse_int(parser)?;
            parser.expect(b')')?;
            Ok(curve.point(x, y)?)
        }
        other => Err(ParseError::Syntax(format!(
            "expected a point, found {:?}",
            other.map(|c| c as char)
        ))),
    }
}

/// Parses "O" or "(x,y)"; the point must lie on the curve.
pub fn parse_point(s: &str, curve: &EllipticCurve) -> Result<CurvePoint, ParseError> {
    let mut parser = Parser::new(s, curve.modulus(), None);
    let pt = parse_point_inner(&mut parser, curve)?;
    parser.finish()?;
    Ok(pt)
}

/// Parses sums like "2*(0,0) - 3*O + (1,0)" into a divisor on the curve.
pub fn parse_divisor(s: &str, curve: &EllipticCurve) -> Result<Divisor, ParseError> {
    let mut parser = Parser::new(s, curve.modulus(), None);
    let mut div = Divisor::new();
    let mut first = true;
    loop {
        let sign = match parser.peek() {
            None if !first => break,
            Some(b'+') => {
                parser.pos += 1;
                1
            }
            Some(b'-') => {
                parser.pos += 1;
                -1
            }
            Some(_) if first => 1,
            other => {
                return Err(ParseError::Syntax(format!(
                    "expected '+' or '-', found {:?}",
                    other.map(|c| c as char)
                )))
            }
        };
        first = false;
        let mult = match parser.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = parser.parse_uint()?;
                let n = i64::try_from(n)
                    .map_err(|_| ParseError::Syntax("multiplicity too large".to_string()))?;
                parser.expect(b'*')?;
                n
            }
            _ => 1,
        };
        let pt = parse_point_inner(&mut parser, curve)?;
        div.add(pt, sign * mult);
        if parser.peek().is_none() {
            break;
        }
    }
    parser.finish()?;
    Ok(div)
}

/// Parses "E/F11: y^2 = x^3 + 10*x + 3" into a curve.
pub fn parse_curve(s: &str) -> Result<EllipticCurve, ParseError> {
    let t = s.trim();
    let rest = t
        .strip_prefix("E/F")
        .ok_or_else(|| ParseError::Syntax("curve must start with 'E/F<p>:'".to_string()))?;
    let colon = rest
        .find(':')
        .ok_or_else(|| ParseError::Syntax("missing ':' after the field".to_string()))?;
    let p: u64 = rest[..colon]
        .trim()
        .parse()
        .map_err(|_| ParseError::Syntax("bad field characteristic".to_string()))?;
    let eqn = rest[colon + 1..].trim();
    let rhs_text = eqn
        .strip_prefix("y^2")
        .map(|r| r.trim_start())
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| ParseError::Syntax("equation must read 'y^2 = ...'".to_string()))?;
    let rhs = parse_ratfn(rhs_text, p)?;
    if !rhs.den().is_one() {
        return Err(ParseError::Syntax("right-hand side must be polynomial".to_string()));
    }
    let cubic = rhs.num();
    if cubic.degree() != crate::poly::Degree::Of(3)
        || cubic.coeff(3).value() != 1
        || !cubic.coeff(2).is_zero()
    {
        return Err(ParseError::Syntax(
            "right-hand side must be a monic cubic with no x^2 term".to_string(),
        ));
    }
    let a = cubic.coeff(1).value() as i64;
    let b = cubic.coeff(0).value() as i64;
    Ok(EllipticCurve::new(p, a, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e11() -> EllipticCurve {
        EllipticCurve::new(11, -1, 0).unwrap()
    }

    #[test]
    fn poly_string_round_trip() {
        let p = Poly::from_i64(&[3, 0, 1, 7], 11);
        let s = poly_to_string(&p);
        assert_eq!(s, "7*x^3 + x^2 + 3");
        let back = parse_ratfn(&s, 11).unwrap();
        assert_eq!(back, RatFn::from_poly(p));
    }

    #[test]
    fn ratfn_string_round_trip() {
        let f = RatFn::new(
            Poly::from_i64(&[-9, 0, 1], 11),
            Poly::from_i64(&[5, 1], 11),
        )
        .unwrap();
        let s = ratfn_to_string(&f);
        assert_eq!(parse_ratfn(&s, 11).unwrap(), f);
    }

    #[test]
    fn curvefn_string_round_trip() {
        let e = e11();
        let f = parse_curvefn("(x^2 + 3)/(x - 1) + (2*x)*y", &e).unwrap();
        let s = curvefn_to_string(&f);
        assert_eq!(parse_curvefn(&s, &e).unwrap(), f);
    }

    #[test]
    fn parser_handles_precedence_and_unary_minus() {
        let f = parse_ratfn("1 + 2*3^2", 11).unwrap();
        assert_eq!(f, RatFn::constant(Fp::new(19, 11)));
        let g = parse_ratfn("-x^2", 11).unwrap();
        assert_eq!(g, -&(&RatFn::x(11) * &RatFn::x(11)));
        let h = parse_ratfn("(1 - x)/(1 + x)", 11).unwrap();
        assert_eq!(h.num().degree(), crate::poly::Degree::Of(1));
    }

    #[test]
    fn y_squared_reduces_to_the_cubic() {
        let e = e11();
        let f = parse_curvefn("y^2", &e).unwrap();
        let g = parse_curvefn("x^3 + 10*x", &e).unwrap();
        assert_eq!(f, g);
        // 1/y = y / (x^3 - x)
        let inv = parse_curvefn("1/y", &e).unwrap();
        let expect = parse_curvefn("y/(x^3 + 10*x)", &e).unwrap();
        assert_eq!(inv, expect);
    }

    #[test]
    fn rejects_y_without_curve_and_trailing_junk() {
        assert!(parse_ratfn("x + y", 11).is_err());
        assert!(parse_ratfn("x + ", 11).is_err());
        assert!(parse_ratfn("x x", 11).is_err());
        assert!(parse_ratfn("1/(x - x)", 11).is_err());
    }

    #[test]
    fn point_and_divisor_round_trip() {
        let e = e11();
        assert_eq!(parse_point("O", &e).unwrap(), CurvePoint::Infinity);
        let pt = parse_point("(4, 4)", &e).unwrap();
        assert_eq!(pt, e.point(4, 4).unwrap());
        assert!(parse_point("(1, 1)", &e).is_err());

        let mut d = Divisor::single(e.point(0, 0).unwrap(), 2);
        d.add(CurvePoint::Infinity, -2);
        let s = format!("{d}");
        assert_eq!(parse_divisor(&s, &e).unwrap(), d);
        let explicit = parse_divisor("2*(0,0) - 2*O", &e).unwrap();
        assert_eq!(explicit, d);
    }

    #[test]
    fn curve_string_round_trip() {
        for (p, a, b) in [(11i64, -1i64, 0i64), (13, 0, 5), (101, 3, 7)] {
            let e = EllipticCurve::new(p as u64, a, b).unwrap();
            let s = format!("{e}");
            assert_eq!(parse_curve(&s).unwrap(), e);
        }
        assert!(parse_curve("E/F11: y^2 = x^3 + x^2").is_err());
        assert!(parse_curve("y^2 = x^3 + 1").is_err());
    }
}
