use std::time::Instant;

use advlab::gasoline::{table3_row, Budget};

fn main() {
    let rows: Vec<(usize, u32)> = std::env::args()
        .skip(1)
        .filter_map(|a| {
            let (d, k) = a.split_once(',')?;
            Some((d.parse().ok()?, k.parse().ok()?))
        })
        .collect();
    let rows = if rows.is_empty() { vec![(2, 2), (3, 2), (2, 3), (4, 2), (3, 3), (4, 3)] } else { rows };
    println!("d k |X| IR OPT ratio seconds");
    for (d, k) in rows {
        let t = Instant::now();
        let row = table3_row(d, k, Some(Budget::seconds(60.0))).expect("row");
        let opt = row.opt_value.map_or("-".to_string(), |v| v.to_string());
        let ratio = row.ratio.map_or("-".to_string(), |r| format!("{:.4}", r.to_f64()));
        println!("{d} {k} {} {} {opt} {ratio} {:.2}", row.len_x, row.ir_value, t.elapsed().as_secs_f64());
    }
}
