fn main() {
    println!("dicke-lambda CLI placeholder");
}
