//! Published systems, generators, bracket tables and closed-form solutions,
//! transcribed verbatim (including their misprints) so that every downstream
//! check compares against exactly what was printed.

use crate::expr::{parse_expr, Expr};
use crate::hierarchy::PdeSystem;
use crate::jet::JetSpec;
use crate::reduce::{OdeSystem, SolutionCandidate};
use crate::symmetry::VectorField;
use crate::{Error, Result};

const MEMBER1: [(&str, &str); 2] = [("v", "-v_x"), ("w", "-w_x")];

const MEMBER2: [(&str, &str); 2] = [("v", "-v_x^2 + w_x^2 + w_xx"), ("w", "-2*v_x*w_x - v_xx")];

const MEMBER3: [(&str, &str); 2] = [
    ("v", "-v_x^3 + 3*v_x*w_x^2 + 3*w_x*v_xx + 3*v_x*w_xx + v_xxx"),
    ("w", "-3*v_x^2*w_x + w_x^3 - 3*v_x*v_xx + 3*w_x*w_xx + w_xxx"),
];

const MEMBER4: [(&str, &str); 2] = [
    (
        "v",
        "v_x^4 - 6*v_x^2*w_x^2 + w_x^4 + 3*w_x*v_xx + 6*v_x*w_x*v_xx + 3*v_xx^2 \
         + 3*v_x*w_xx + 3*v_x^2*w_xx - 3*w_x^2*w_xx - 3*w_xx^2 + 4*v_x*v_xxx \
         - 4*w_x*w_xxx - w_xxxx",
    ),
    (
        "w",
        "4*v_x^3*w_x - 4*v_x*w_x^3 - 3*v_x*v_xx - 3*v_x^2*v_xx + 3*w_x^2*v_xx \
         + 3*w_x*w_xx + 6*v_x*w_x*w_xx + 6*v_xx*w_xx + 4*w_x*v_xxx + 4*v_x*w_xxx \
         + v_xxxx",
    ),
];

/// Printed real/imaginary system of member `k` (1 to 4).
pub fn member(k: usize) -> Result<PdeSystem> {
    let eqs: &[(&str, &str)] = match k {
        1 => &MEMBER1,
        2 => &MEMBER2,
        3 => &MEMBER3,
        4 => &MEMBER4,
        _ => return Err(Error::NoSuchMember(k)),
    };
    PdeSystem::parse(JetSpec::real_pde(k), eqs, &format!("member {k}"))
}

/// Printed complex form of member `k`; member 3 is only printed split.
pub fn complex_member(k: usize) -> Result<Expr> {
    let text = match k {
        1 => "-u_x",
        2 => "-u_x^2 - I*u_xx",
        4 => "u_x^4 + 3*u_xx^2 + 4*u_x*u_xxx + I*(-3*u_x*u_xx - 3*u_x^2*u_xx + u_xxxx)",
        _ => return Err(Error::NoSuchMember(k)),
    };
    parse_expr(text, &JetSpec::complex_pde(4))
}

/// The reduced ODE systems that are printed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrintedOde {
    /// Travelling-wave reduction of member 2, second order in `f, g`.
    Member2Wave,
    /// Its first-order form in `F = f'`, `G = g'`.
    Member2FirstOrder,
    /// Travelling-wave reduction of member 3, third order in `f, g`.
    Member3Wave,
    /// Its second-order form in `F, G`.
    Member3Reduced,
    /// Travelling-wave reduction of member 4, fourth order in `f, g`.
    Member4Wave,
    /// The single second-order equation for `F`.
    SecondOrderF,
}

impl PrintedOde {
    pub const ALL: [PrintedOde; 6] = [
        PrintedOde::Member2Wave,
        PrintedOde::Member2FirstOrder,
        PrintedOde::Member3Wave,
        PrintedOde::Member3Reduced,
        PrintedOde::Member4Wave,
        PrintedOde::SecondOrderF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrintedOde::Member2Wave => "member2-wave",
            PrintedOde::Member2FirstOrder => "member2-first-order",
            PrintedOde::Member3Wave => "member3-wave",
            PrintedOde::Member3Reduced => "member3-reduced",
            PrintedOde::Member4Wave => "member4-wave",
            PrintedOde::SecondOrderF => "second-order-f",
        }
    }

    pub fn from_name(name: &str) -> Result<PrintedOde> {
        PrintedOde::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown system `{name}`")))
    }

    fn source(self) -> (&'static [&'static str], usize, &'static [&'static str]) {
        const FG: &[&str] = &["f", "g"];
        const UPPER: &[&str] = &["F", "G"];
        match self {
            PrintedOde::Member2Wave => (FG, 2, &["g'' - f'^2 + g'^2 + c*f'", "f'' + 2*f'*g' - c*g'"]),
            PrintedOde::Member2FirstOrder => (UPPER, 1, &["G' + c*F + G^2 - F^2", "F' + 2*F*G - c*G"]),
            PrintedOde::Member3Wave => (
                FG,
                3,
                &[
                    "f''' + c*f' - f'^3 + 3*f'*g'^2 + 3*g'*f'' + 3*f'*g''",
                    "g''' + c*g' - 3*f'^2*g' + g'^3 - 3*f'*f'' + 3*g'*g''",
                ],
            ),
            PrintedOde::Member3Reduced => (
                UPPER,
                2,
                &[
                    "F'' - c*F - F^3 + 3*F*G^2 + 3*G*F' + 3*F*G'",
                    "G'' - c*G - 3*F^2*G + G^3 - 3*F*F' + 3*G*G'",
                ],
            ),
            PrintedOde::Member4Wave => (
                FG,
                4,
                &[
                    "g'''' - (f'^4 - 6*f'^2*g'^2 + g'^4 + 3*g'*f'' + 6*f'*g'*f'' + 3*f''^2 \
                     + 3*f'*g'' + 3*f'^2*g'' - 3*g'^2*g'' - 3*g''^2 + 4*f'*f''' + 4*g'*g''' + c*f')",
                    "f'''' - (4*f'*g'^3 - 4*f'^3*g' + 3*f'*f'' + 3*f'^2*f'' - 3*g'^2*f'' - 3*g'*g'' \
                     - 6*f'*g'*g'' - 6*f''*g'' - 4*g'*f''' + 4*f'*g''' - c*g')",
                ],
            ),
            PrintedOde::SecondOrderF => (
                &["F"],
                2,
                &["F'' + 3*F'^2*(2*F - c)^-1 - F*(F - c)*(2*F - c)"],
            ),
        }
    }

    pub fn system(self) -> Result<OdeSystem> {
        let (deps, order, eqs) = self.source();
        let jet = JetSpec::ode(deps, &["c"], order);
        OdeSystem::parse(jet, eqs, self.name())
    }
}

fn fields(jet: &JetSpec, texts: &[&str]) -> Result<Vec<VectorField>> {
    texts.iter().map(|t| VectorField::parse(t, jet)).collect()
}

/// Printed finite generators of member 2 (seven fields).
pub fn member2_generators() -> Result<Vec<VectorField>> {
    fields(
        &JetSpec::real_pde(2),
        &[
            "xi_t = 1",
            "xi_t = t; xi_x = x/2",
            "xi_t = t^2; xi_x = t*x; eta_v = x^2/4; eta_w = -t/2",
            "xi_x = 1",
            "xi_x = t; eta_v = x/2",
            "eta_v = 1",
            "eta_w = 1",
        ],
    )
}

/// Printed finite generators of member 3 (seven fields; the second is the
/// printed form, which lacks the factor `t` on `D_t`).
pub fn member3_generators() -> Result<Vec<VectorField>> {
    fields(
        &JetSpec::real_pde(3),
        &[
            "xi_t = 1",
            "xi_t = 1; xi_x = x/3",
            "xi_x = 1",
            "eta_w = 1",
            "eta_v = sin(2*v)/2; eta_w = -cos(2*v)/2",
            "eta_v = cos(2*v)/2; eta_w = sin(2*v)/2",
            "eta_v = 1",
        ],
    )
}

/// The scaling `t D_t + x/3 D_x` contained in the generic symmetry of member 3.
pub fn member3_scaling() -> Result<VectorField> {
    VectorField::parse("xi_t = t; xi_x = x/3", &JetSpec::real_pde(3))
}

/// Printed generators of member 4: the four translations.
pub fn member4_generators() -> Result<Vec<VectorField>> {
    fields(&JetSpec::real_pde(4), &["xi_t = 1", "eta_v = 1", "eta_w = 1", "xi_x = 1"])
}

pub fn member_generators(k: usize) -> Result<Vec<VectorField>> {
    match k {
        2 => member2_generators(),
        3 => member3_generators(),
        4 => member4_generators(),
        _ => Err(Error::NoSuchMember(k)),
    }
}

/// The `a, b` part of the infinite family of member 2 with the printed
/// constraints on `a(t,x)`, `b(t,x)`.
pub fn member2_family() -> Result<VectorField> {
    member2_family_with("a_t = a_xx", "b_t = b_xx")
}

/// Same coefficients with caller-chosen constraints; an empty constraint
/// leaves that function free.
pub fn member2_family_with(a_constraint: &str, b_constraint: &str) -> Result<VectorField> {
    let decl = |name: &str, c: &str| {
        if c.is_empty() {
            format!("unknown {name}(t,x)")
        } else {
            format!("unknown {name}(t,x): {c}")
        }
    };
    VectorField::parse(
        &format!(
            "{}\n{}\n\
             eta_w = exp(-w)*(a*cos(v) - b*sin(v))\n\
             eta_v = -exp(-w)*(b*cos(v) + a*sin(v))",
            decl("a", a_constraint),
            decl("b", b_constraint)
        ),
        &JetSpec::real_pde(2),
    )
}

/// The `c, d` part of the infinite family of member 3.
pub fn member3_family() -> Result<VectorField> {
    VectorField::parse(
        "unknown c(t,x): c_t = c_xxx\nunknown d(t,x): d_t = d_xxx\n\
         eta_w = -exp(-w)*(-d*cos(v) + c*sin(v))\n\
         eta_v = -exp(-w)*(c*cos(v) + d*sin(v))",
        &JetSpec::real_pde(3),
    )
}

/// Concrete members `h(x - t, v, w) D_v` of the infinite family of member 1:
/// a polynomial, a trigonometric and an exponential choice of `h`.
pub fn member1_family_samples() -> Result<Vec<VectorField>> {
    fields(
        &JetSpec::real_pde(1),
        &[
            "eta_v = (x - t)^2*v + 3*v*w^2 - x + t",
            "eta_v = sin(x - t + 2*v)*w",
            "eta_v = exp(w - x + t)*(x - t)",
        ],
    )
}

/// The twelve printed generators of the member-2 wave system.
pub fn member2_wave_generators() -> Result<Vec<VectorField>> {
    let jet = JetSpec::ode(&["f", "g"], &["c"], 2);
    fields(
        &jet,
        &[
            "xi_s = 1",
            "eta_f = cos(2*f)*cos(c*s)/2 + sin(2*f)*sin(c*s)/2; \
             eta_g = cos(c*s)*sin(2*f)/2 - cos(2*f)*sin(c*s)/2",
            "eta_f = cos(2*f)*sin(c*s)/2 - cos(c*s)*sin(2*f)/2; \
             eta_g = cos(2*f)*cos(c*s)/2 + sin(2*f)*sin(c*s)/2",
            "eta_f = 1",
            "eta_g = 1",
            "eta_f = -exp(-g)*cos(f); eta_g = -exp(-g)*sin(f)",
            "eta_f = -exp(-g)*cos(f)*cos(c*s)/c - exp(-g)*sin(f)*sin(c*s)/c; \
             eta_g = -(exp(-g)*cos(c*s)*sin(f)/c + exp(-g)*cos(f)*sin(c*s)/c)",
            "eta_f = exp(-g)*cos(c*s)*sin(f)/c - exp(-g)*cos(f)*sin(c*s)/c; \
             eta_g = -exp(-g)*cos(f)*cos(c*s)/c - exp(-g)*sin(f)*sin(c*s)/c",
            "eta_f = -exp(-g)*sin(f); eta_g = exp(-g)*cos(f)",
            "xi_s = exp(g)*cos(f); eta_f = c*exp(g)*cos(f)/2; eta_g = -c*exp(g)*sin(f)/2",
            "xi_s = exp(g)*sin(f)*sin(c*s)/c + exp(g)*cos(f)*cos(c*s)/c; \
             eta_f = exp(g)*cos(f)*cos(c*s)/2 + exp(g)*sin(f)*sin(c*s)/2; \
             eta_g = exp(g)*cos(c*s)*sin(f)/2 - exp(g)*cos(f)*sin(c*s)/2",
            "xi_s = -(exp(g)*cos(c*s)*sin(f)/c + exp(g)*cos(f)*sin(c*s)/c); \
             eta_f = -(exp(g)*cos(c*s)*sin(f)/2 + exp(g)*cos(f)*sin(c*s)/2); \
             eta_g = exp(g)*cos(f)*cos(c*s)/2 + exp(g)*sin(f)*sin(c*s)/2",
        ],
    )
}

/// The five printed generators of the member-3 wave system.
pub fn member3_wave_generators() -> Result<Vec<VectorField>> {
    let jet = JetSpec::ode(&["f", "g"], &["c"], 3);
    fields(
        &jet,
        &[
            "eta_f = 1",
            "eta_g = 1",
            "xi_s = -sin(sqrt(c)*s)/sqrt(c); eta_g = -cos(sqrt(c)*s)",
            "xi_s = -cos(sqrt(c)*s)/sqrt(c); eta_g = sin(sqrt(c)*s)",
            "xi_s = 1",
        ],
    )
}

/// One printed bracket `[X_left, X_right] = sum coef * X_k` with 1-based
/// indices into the corresponding generator list.
#[derive(Clone, Debug)]
pub struct PrintedBracket {
    pub left: usize,
    pub right: usize,
    pub combination: Vec<(Expr, usize)>,
}

fn brackets(jet: &JetSpec, rows: &[(usize, usize, &[(&str, usize)])]) -> Result<Vec<PrintedBracket>> {
    rows.iter()
        .map(|(l, r, comb)| {
            Ok(PrintedBracket {
                left: *l,
                right: *r,
                combination: comb
                    .iter()
                    .map(|(c, k)| Ok((parse_expr(c, jet)?, *k)))
                    .collect::<Result<_>>()?,
            })
        })
        .collect()
}

/// The printed nonzero brackets of the member-2 generators.
pub fn member2_printed_brackets() -> Result<Vec<PrintedBracket>> {
    brackets(
        &JetSpec::real_pde(2),
        &[
            (1, 5, &[("1", 1)]),
            (1, 6, &[("1", 2)]),
            (1, 7, &[("2", 5), ("-1/2", 4)]),
            (2, 5, &[("1/2", 2)]),
            (2, 6, &[("1/2", 3)]),
            (2, 7, &[("1", 6)]),
            (5, 6, &[("1/2", 6)]),
            (5, 7, &[("1", 7)]),
        ],
    )
}

/// The printed nonzero brackets of the member-3 generators.
pub fn member3_printed_brackets() -> Result<Vec<PrintedBracket>> {
    brackets(
        &JetSpec::real_pde(3),
        &[
            (1, 3, &[("1", 1)]),
            (2, 3, &[("1/3", 2)]),
            (5, 6, &[("-1/2", 7)]),
            (5, 7, &[("-2", 6)]),
        ],
    )
}

/// The printed brackets among generators 3, 4, 5 of the member-3 wave system.
pub fn member3_wave_printed_brackets() -> Result<Vec<PrintedBracket>> {
    brackets(
        &JetSpec::ode(&["f", "g"], &["c"], 3),
        &[
            (3, 4, &[("-sqrt(c)^-1", 5)]),
            (3, 5, &[("-sqrt(c)", 4)]),
            (4, 5, &[("sqrt(c)", 3)]),
        ],
    )
}

/// The constant-plus-tangent solution of the member-2 first-order system.
pub fn tan_solution() -> Result<SolutionCandidate> {
    SolutionCandidate::parse(
        &JetSpec::ode(&["F", "G"], &["c", "s0"], 1),
        &[("F", "c/2"), ("G", "-1/2*c*tan(1/2*c*s - 1/2*c*s0)")],
        &[],
    )
}

/// The printed rational-exponential solution of the member-2 first-order
/// system, with `G = -F'/(2F - c)`.
pub fn rational_exp_solution() -> Result<SolutionCandidate> {
    let jet = JetSpec::ode(&["F", "G"], &["c", "F0", "F1"], 1);
    let f = parse_expr(
        "c/2*(F0*(exp(-2*I*c*s) - F1*c)^2 - 16*c^2 - 8*c*F0*exp(-I*c*s)) \
         * (F0*(exp(-2*I*c*s) - F1*c)^2 - 16*c^2)^-1",
        &jet,
    )?;
    let df = f.derive(&crate::expr::Atom::sym("s"))?;
    let denom = (Expr::from_int(2) * f.clone()) - Expr::sym("c");
    let g = -(df * denom.recip()?);
    Ok(SolutionCandidate::from_exprs(jet, vec![("F".into(), f), ("G".into(), g)], vec![]))
}

/// The printed rational-trigonometric solution of the member-3 reduced system.
pub fn rational_trig_solution() -> Result<SolutionCandidate> {
    SolutionCandidate::parse(
        &JetSpec::ode(&["F", "G"], &["c", "G0", "G1"], 2),
        &[
            ("F", "0"),
            (
                "G",
                "sqrt(c)*(sin(sqrt(c)*s) - G0*cos(sqrt(c)*s))*(G0*sin(sqrt(c)*s) + cos(sqrt(c)*s) + G1)^-1",
            ),
        ],
        &[],
    )
}

/// `G = 0`, `F = F0 sn(s, k)` on the member-3 reduced system.
pub fn elliptic_solution() -> Result<SolutionCandidate> {
    SolutionCandidate::elliptic(&JetSpec::ode(&["F", "G"], &["c", "F0"], 2), "F", "F0", "G")
}

/// `g = g0`, `f = f1 s + f0` on the member-4 wave system, with the constraint
/// `f1 (f1^3 + c) = 0` found by direct substitution.
pub fn linear_solution() -> Result<SolutionCandidate> {
    SolutionCandidate::parse(
        &JetSpec::ode(&["f", "g"], &["c", "f0", "f1", "g0"], 4),
        &[("f", "f1*s + f0"), ("g", "g0")],
        &["f1^4 + c*f1"],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn everything_parses() {
        for k in 1..=4 {
            let m = member(k).unwrap();
            assert_eq!(m.order(), k);
        }
        assert!(member(5).is_err());
        assert_eq!(member2_generators().unwrap().len(), 7);
        assert_eq!(member3_generators().unwrap().len(), 7);
        assert_eq!(member2_wave_generators().unwrap().len(), 12);
        assert_eq!(member3_wave_generators().unwrap().len(), 5);
        for p in PrintedOde::ALL {
            assert_eq!(PrintedOde::from_name(p.name()).unwrap(), p);
            p.system().unwrap();
        }
        member2_family().unwrap();
        member3_family().unwrap();
        assert_eq!(member1_family_samples().unwrap().len(), 3);
        assert_eq!(member2_printed_brackets().unwrap().len(), 8);
        member3_wave_printed_brackets().unwrap();
        complex_member(4).unwrap();
    }
}
