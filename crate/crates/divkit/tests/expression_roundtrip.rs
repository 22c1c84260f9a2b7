//! Structural round-trip of the expression printer and parser on random
//! ASTs, plus evaluation agreement on a shared grid.

use divkit::varfun::{BinOp, Expr, Func, VfExpression};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr<f64>> {
    prop_oneof![
        (0u32..10_000).prop_map(|n| Expr::Literal(f64::from(n) / 1000.0)),
        Just(Expr::Mu),
    ]
}

fn ast(depth: u32) -> impl Strategy<Value = Expr<f64>> {
    leaf().prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (inner.clone(), inner.clone(), 0u8..5).prop_map(|(l, r, op)| {
                let op = match op {
                    0 => BinOp::Add,
                    1 => BinOp::Sub,
                    2 => BinOp::Mul,
                    3 => BinOp::Div,
                    _ => BinOp::Pow,
                };
                Expr::Binary(op, Box::new(l), Box::new(r))
            }),
            (inner, 0u8..2).prop_map(|(e, f)| {
                let f = if f == 0 { Func::Exp } else { Func::Log };
                Expr::Call(f, Box::new(e))
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn print_then_parse_reproduces_the_ast(root in ast(5)) {
        let original = VfExpression::from_ast(root);
        let printed = original.to_string();
        let reparsed = VfExpression::<f64>::parse(&printed)
            .unwrap_or_else(|e| panic!("`{printed}` failed to reparse: {e}"));
        prop_assert_eq!(&reparsed, &original, "printed form: {}", printed);

        // Same tree, so evaluation outcomes must agree wherever defined.
        for mu in [0.1, 0.5, 1.0, 2.5, 7.0] {
            match (original.eval(mu), reparsed.eval(mu)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "eval mismatch at {}: {:?} vs {:?}", mu, a, b),
            }
        }
    }
}
