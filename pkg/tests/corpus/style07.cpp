#include <iostream>
#include <array>
using namespace std;

struct Point { int x, y; };

static int dot(const Point& p, const Point& q) { return p.x*q.x+p.y*q.y; }

int main(int argc, char** argv)
{
	array<Point, 3> pts{{{1, 2}, {3, 4}, {5, 6}}};
	int sum=0;
	for(auto& p:pts) sum+=dot(p,p);
	switch(argc){
	case 1: cout << "none" << endl; break;
	case 2:
		cout << argv[1] << endl;
		break;
	default: break;
	}
	int k=sum%7;
	do k--; while(k>0);
	return sum-k;
}
