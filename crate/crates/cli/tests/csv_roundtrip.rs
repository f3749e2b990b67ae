use proptest::prelude::*;
use purify_cli::csv::{format_float, parse, write_curve};

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
}

proptest! {
    #[test]
    fn formatted_floats_parse_back_exactly(v in finite()) {
        prop_assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn curves_parse_back_exactly(rows in prop::collection::vec((finite(), 0.0..1.0f64), 0..20)) {
        let (times, values): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
        let mut buf = Vec::new();
        write_curve(&mut buf, &times, &values).unwrap();
        let table = parse(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(table.column("t").unwrap(), times);
        prop_assert_eq!(table.column("L").unwrap(), values);
    }
}
