use cmpart::cm_trace::{class_polynomial, trace};
use cmpart::partition::euler_p;
use std::time::Instant;

fn main() {
    let total = Instant::now();
    for n in 1..=30u64 {
        let t0 = Instant::now();
        let t = trace(n).unwrap();
        let ok = t.p_of_n.to_string() == euler_p(n as usize).to_string();
        println!(
            "n={n}: p={} pts={} bits={} terms={} oracle={} [{:?}]",
            t.p_of_n, t.class_count, t.bits_used, t.terms_used,
            if ok { "ok" } else { "MISMATCH" },
            t0.elapsed()
        );
        assert!(ok);
    }
    // integrality spot checks on the awkward non-fundamental cases
    for n in [24u64, 30] {
        let t0 = Instant::now();
        let c = class_polynomial(n).unwrap();
        println!("Hhat_{n}: degree {} integral ok [{:?}]", c.scaled_coeffs.len() - 1, t0.elapsed());
    }
    println!("total: {:?}", total.elapsed());
}
