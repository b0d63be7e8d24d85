fn main() {
    use charsum_core::analytic::TestFunction;
    use std::io::Write;
    use std::time::Instant;
    let g = TestFunction::bump(40.0, 80.0);
    let t0 = Instant::now();
    let t = charsum_core::voronoi::GL3Transform::new(&g, -0.5).unwrap();
    println!("build(-0.5): {:?}", t0.elapsed());
    std::io::stdout().flush().unwrap();
    let t0 = Instant::now();
    let v = t.eval(1.0, true);
    println!("G+(1) = {v:.6e} in {:?}", t0.elapsed());
    std::io::stdout().flush().unwrap();
    for y in [0.1, 1.0, 10.0, 100.0, 1000.0] {
        println!("G+({y}) = {:.6e}", t.eval(y, true));
    }
    std::io::stdout().flush().unwrap();
    let t0 = Instant::now();
    let t1 = charsum_core::voronoi::GL3Transform::new(&g, 1.0).unwrap();
    println!("build(1.0): {:?}, G+(1) = {:.6e}", t0.elapsed(), t1.eval(1.0, true));
}
