#include <iostream>

#include "addcomb/pipeline.hpp"

int main() {
    std::cout << "addcomb cli placeholder\n";
    return 0;
}
