fn main() {
    println!("debolt");
}
