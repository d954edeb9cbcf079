use proptest::prelude::*;
use spinning_switches_cli::expr::{parse_expr, GroupTerm, PuzzleExpr};

fn factor() -> impl Strategy<Value = GroupTerm> {
    prop_oneof![
        (prop_oneof![Just('Z'), Just('C')], 1usize..100).prop_map(|(c, n)| GroupTerm::Cyclic(c, n)),
        (1usize..8).prop_map(GroupTerm::Symmetric),
        (1usize..8).prop_map(GroupTerm::Alternating),
        (1usize..20).prop_map(|n| GroupTerm::Dihedral(2 * n)),
        Just(GroupTerm::Trivial),
        "[a-z][a-z0-9_./-]{0,8}".prop_map(GroupTerm::File),
    ]
}

fn term() -> impl Strategy<Value = GroupTerm> {
    factor().prop_recursive(3, 12, 2, |inner| {
        (inner.clone(), inner).prop_map(|(a, b)| GroupTerm::Product(Box::new(a), Box::new(b)))
    })
}

fn expr() -> impl Strategy<Value = PuzzleExpr> {
    (term(), term(), proptest::option::of("[a-z][a-z0-9_.]{0,6}"))
        .prop_map(|(switches, spins, action_file)| PuzzleExpr { switches, spins, action_file })
}

proptest! {
    #[test]
    fn print_parse_round_trip(e in expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse_expr(&text).unwrap(), e);
    }

    #[test]
    fn canonical_text_is_a_fixed_point(e in expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse_expr(&text).unwrap().to_string(), text);
    }

    #[test]
    fn malformed_input_reports_a_position(s in "[ZCSAD1x() @wron≀×a-z0-9]{0,16}") {
        // never panics; every syntax error carries a column within the input
        if let Err(e) = parse_expr(&s) {
            let pos = e.position().expect("syntax errors have positions");
            prop_assert!(pos >= 1 && pos <= s.chars().count() + 1);
        }
    }

    #[test]
    fn truncation_is_an_error(e in expr(), cut in 1usize..4) {
        let text = e.to_string();
        let chars: Vec<char> = text.chars().collect();
        let wr = text.find(" wr ").unwrap();
        let keep = chars.len().saturating_sub(cut).min(wr);
        let truncated: String = chars[..keep].iter().collect();
        prop_assert!(parse_expr(&truncated).is_err());
    }
}
