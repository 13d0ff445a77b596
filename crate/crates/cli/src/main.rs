fn main() {
    let _ = ahardy_core::moebius::placeholder();
}
