#include "instanton/cli.hpp"

int main(int argc, char** argv) { return instanton::run(argc, argv); }
