#include <cstdio>

int main() {
    std::puts("wakelab: command-line interface under construction");
    return 0;
}
