fn main() {
    for (m, n) in [(3usize, 3usize), (3, 4), (4, 4), (5, 5)] {
        println!("ML({m},{n}) = {}", missdeg::combinatorics::ml_degree(m, n));
    }
}
