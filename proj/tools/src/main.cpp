#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) { return bnk::app::main(argc, argv, std::cout, std::cerr); }
