//! Property tests for the expression language: printing reparses to the
//! same tree, and evaluation agrees with an independent reference
//! evaluator.

use proptest::prelude::*;

use fracbvp::expr::{BinOp, Expr, Func, Var};

// Number literals are nonnegative: the grammar spells negative constants
// with unary minus, so only nonnegative literals are parser-producible.
fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0i32..=400).prop_map(|n| Expr::Number(n as f64 / 4.0)),
        Just(Expr::Var(Var::T)),
        Just(Expr::Var(Var::Y)),
    ]
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 64, 4, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), any::<u8>()).prop_map(|(a, b, op)| {
                let op = match op % 5 {
                    0 => BinOp::Add,
                    1 => BinOp::Sub,
                    2 => BinOp::Mul,
                    3 => BinOp::Div,
                    _ => BinOp::Pow,
                };
                Expr::Binary(op, Box::new(a), Box::new(b))
            }),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), any::<u8>()).prop_map(|(a, f)| {
                let f = match f % 4 {
                    0 => Func::Exp,
                    1 => Func::Ln,
                    2 => Func::Sqrt,
                    _ => Func::Abs,
                };
                Expr::Call(f, vec![a])
            }),
            (inner.clone(), inner, any::<bool>()).prop_map(|(a, b, is_min)| {
                Expr::Call(if is_min { Func::Min } else { Func::Max }, vec![a, b])
            }),
        ]
    })
}

/// Direct recursive evaluation with the same domain rules as `Expr::eval`,
/// implemented independently of the parser/printer path. `None` marks a
/// domain violation.
fn reference_eval(e: &Expr, t: f64, y: f64) -> Option<f64> {
    let v = match e {
        Expr::Number(x) => *x,
        Expr::Var(Var::T) => t,
        Expr::Var(Var::Y) => y,
        Expr::Neg(a) => -reference_eval(a, t, y)?,
        Expr::Binary(op, a, b) => {
            let a = reference_eval(a, t, y)?;
            let b = reference_eval(b, t, y)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return None;
                    }
                    a / b
                }
                BinOp::Pow => {
                    if (a == 0.0 && b < 0.0) || (a < 0.0 && b.fract() != 0.0) {
                        return None;
                    }
                    a.powf(b)
                }
            }
        }
        Expr::Call(f, args) => {
            let a = reference_eval(&args[0], t, y)?;
            match f {
                Func::Exp => a.exp(),
                Func::Ln => {
                    if a <= 0.0 {
                        return None;
                    }
                    a.ln()
                }
                Func::Sqrt => {
                    if a < 0.0 {
                        return None;
                    }
                    a.sqrt()
                }
                Func::Abs => a.abs(),
                Func::Min => a.min(reference_eval(&args[1], t, y)?),
                Func::Max => a.max(reference_eval(&args[1], t, y)?),
            }
        }
    };
    if v.is_nan() {
        return None;
    }
    Some(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(tree in arb_expr()) {
        let printed = tree.to_string();
        let reparsed = Expr::parse(&printed)
            .unwrap_or_else(|e| panic!("printed `{printed}` failed to parse: {e}"));
        prop_assert_eq!(&reparsed, &tree, "printed as `{}`", printed);
    }

    #[test]
    fn eval_agrees_with_reference(tree in arb_expr(), t in 0.1f64..5.0, y in 0.0f64..10.0) {
        let printed = tree.to_string();
        let parsed = Expr::parse(&printed).unwrap();
        match reference_eval(&tree, t, y) {
            Some(expected) if expected.is_finite() => {
                let got = parsed.eval(t, y).unwrap_or_else(|e| {
                    panic!("eval of `{printed}` failed but reference gave {expected}: {e}")
                });
                let tol = 1e-12 * expected.abs().max(1.0);
                prop_assert!((got - expected).abs() <= tol, "`{}`: {} vs {}", printed, got, expected);
            }
            Some(_) => {} // overflowed to infinity; comparison is meaningless
            None => {
                prop_assert!(parsed.eval(t, y).is_err(), "`{}` should be a domain error", printed);
            }
        }
    }
}
