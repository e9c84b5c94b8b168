#include <cstdio>
int main() { std::puts("convexint: placeholder"); return 0; }
