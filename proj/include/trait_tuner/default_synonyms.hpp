#pragma once

#include <string_view>

namespace trait_tuner {

// Built-in synonym lexicon of common adjectives and adverbs, in the synonym
// table file format (word<TAB>syn1,syn2,...).
inline constexpr std::string_view default_synonym_tsv = R"(able	capable,competent
absolutely	completely,totally
active	busy,lively
actually	really,truly
afraid	scared,fearful
almost	nearly,practically
always	constantly,forever
amazing	astonishing,stunning,incredible
angry	mad,furious,irate
annoying	irritating,bothersome
anxious	nervous,uneasy,worried
awful	terrible,dreadful
bad	poor,lousy
basically	essentially,fundamentally
beautiful	lovely,gorgeous,pretty
big	large,huge,sizable
boring	dull,tedious
brave	courageous,bold
bright	brilliant,vivid
brilliant	bright,clever
busy	occupied,engaged
calm	peaceful,serene,tranquil
careful	cautious,attentive
careless	sloppy,negligent
certainly	surely,definitely
cheap	inexpensive,affordable
cheerful	happy,jolly,upbeat
clean	spotless,tidy
clear	obvious,plain
clever	smart,bright,sharp
close	near,nearby
cold	chilly,cool,frosty
common	usual,ordinary
completely	entirely,totally,fully
confident	assured,certain
confused	puzzled,bewildered
constantly	continually,always
cool	chilly,calm
correct	right,accurate
crazy	insane,wild
curious	inquisitive,interested
cute	adorable,sweet
dangerous	risky,hazardous
dark	dim,gloomy
definitely	certainly,surely
delicious	tasty,yummy
difficult	hard,tough
dirty	filthy,grimy
eager	keen,enthusiastic
early	prompt,premature
easily	effortlessly,readily
easy	simple,effortless
empty	vacant,hollow
energetic	lively,vigorous,dynamic
enormous	huge,immense,massive
entirely	completely,wholly
especially	particularly,notably
exactly	precisely,just
excellent	superb,outstanding,great
excited	thrilled,eager
exciting	thrilling,exhilarating
extremely	very,exceedingly
fair	just,reasonable
famous	renowned,celebrated
fancy	elaborate,ornate
fast	quick,rapid,speedy
fat	plump,chubby
fine	okay,good
finally	eventually,ultimately
foolish	silly,stupid
frankly	honestly,candidly
free	unrestricted,gratis
frequently	often,regularly
fresh	new,crisp
friendly	amiable,kind,cordial
frightened	scared,afraid
funny	amusing,humorous,hilarious
gentle	mild,soft,tender
gigantic	huge,colossal
glad	happy,pleased
gloomy	dismal,dreary
good	great,fine,nice
gorgeous	beautiful,stunning
grateful	thankful,appreciative
great	excellent,wonderful
greedy	selfish,grasping
grumpy	cranky,crabby
happy	glad,joyful,cheerful
hard	difficult,tough
harsh	severe,rough
healthy	fit,well
heavy	weighty,hefty
helpful	useful,supportive
honest	truthful,sincere
honestly	truthfully,frankly
hot	warm,heated
huge	enormous,vast,gigantic
hungry	starving,famished
immediately	instantly,promptly
important	significant,crucial,vital
impossible	unattainable,unthinkable
incredible	unbelievable,amazing
intelligent	smart,clever,bright
interesting	fascinating,intriguing
kind	nice,caring,considerate
large	big,huge
late	tardy,overdue
lazy	idle,sluggish
light	bright,weightless
likely	probably,probable
little	small,tiny
lively	energetic,animated
lonely	alone,isolated
loud	noisy,booming
lovely	pleasant,charming
lucky	fortunate,blessed
mad	angry,furious
main	primary,chief
maybe	perhaps,possibly
mean	cruel,unkind
messy	untidy,cluttered
mostly	mainly,largely
narrow	thin,slim
nasty	horrible,unpleasant
naughty	mischievous,disobedient
nearly	almost,practically
neat	tidy,orderly
nervous	anxious,jittery,tense
new	fresh,novel
nice	pleasant,lovely,kind
noisy	loud,rowdy
normal	ordinary,typical
obviously	clearly,evidently
odd	strange,weird
often	frequently,regularly
old	aged,ancient
open	accessible,receptive
ordinary	normal,common
perfect	ideal,flawless
perhaps	maybe,possibly
pleasant	nice,agreeable
polite	courteous,respectful
poor	needy,impoverished
popular	well-liked,favored
possibly	perhaps,maybe
powerful	strong,mighty
pretty	attractive,lovely
probably	likely,presumably
proud	pleased,gratified
quick	fast,swift,rapid
quickly	rapidly,swiftly
quiet	silent,hushed
quietly	silently,softly
rapidly	quickly,swiftly
rarely	seldom,infrequently
ready	prepared,set
real	genuine,authentic
really	truly,very
relaxed	calm,easygoing
rich	wealthy,affluent
right	correct,proper
rude	impolite,disrespectful
sad	unhappy,sorrowful,down
safe	secure,protected
scared	afraid,frightened
selfish	greedy,egotistic
serious	solemn,grave
shy	timid,bashful
silly	foolish,goofy
simple	easy,plain
simply	merely,just
sincere	genuine,earnest
slow	sluggish,leisurely
slowly	gradually,leisurely
small	little,tiny
smart	clever,intelligent
soft	gentle,smooth
sometimes	occasionally,periodically
special	unique,particular
strange	odd,weird,peculiar
strong	powerful,sturdy
stupid	dumb,foolish
sudden	abrupt,unexpected
suddenly	abruptly,unexpectedly
sure	certain,confident
surely	certainly,definitely
surprised	astonished,amazed
sweet	sugary,kind
talented	gifted,skilled
terrible	awful,horrible,dreadful
thankful	grateful,appreciative
thin	slim,slender
tidy	neat,orderly
tiny	small,minute
tired	exhausted,weary,sleepy
totally	completely,entirely
tough	hard,strong
true	accurate,correct
truly	really,genuinely
ugly	unattractive,hideous
unhappy	sad,miserable
unusual	uncommon,rare
upset	distressed,troubled
useful	helpful,handy
usually	normally,generally
very	really,extremely
warm	cozy,heated
weak	feeble,frail
weird	odd,strange,bizarre
wet	damp,soaked
whole	entire,complete
wild	untamed,savage
wise	sage,sensible
wonderful	marvelous,fantastic,terrific
worried	anxious,concerned
wrong	incorrect,mistaken
young	youthful,juvenile
)";

} // namespace trait_tuner
