use std::time::Instant;

use advlab::gasoline::{gen_extension, iterative_rounding};

fn main() {
    let args: Vec<u32> = std::env::args().skip(1).map(|a| a.parse().expect("integer")).collect();
    let (d, k) = (args[0] as usize, args[1]);
    let inst = gen_extension(d, k).expect("instance");
    let t = Instant::now();
    let tr = iterative_rounding(&inst).expect("rounding");
    println!("n={} ir={} relaxation={} secs={:.2}", inst.len(), tr.objective, tr.relaxation, t.elapsed().as_secs_f64());
}
