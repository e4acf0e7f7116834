#include <cstdio>
#include <cstring>

/* Raw strings, character literals and comments that mention
   keywords: if while for return goto */
const char *kUsage = R"(usage: tool [-v] FILE
  for each FILE, print "if" counts)";

int count_if(const char *text)
{
  int hits = 0;   // if (x) -- not code
  const char *p = text;
  while ((p = strstr(p, "if")) != 0) {
    hits++;
    p += 2;
  }
  return hits;
}

int main(int argc, char *argv[])
{
  if (argc < 2) { std::puts(kUsage); return 1; }
  std::printf("%d\n", count_if(argv[1]));
  char sep = ';', quote = '"';
  return sep == quote;
}
