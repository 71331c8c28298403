#include "uvlink/commands.hpp"

int main(int argc, char** argv) { return uvlink::cli::run(argc, argv); }
